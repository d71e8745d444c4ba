#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aibom {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed JSON/YAML text. `offset` is the byte position of the failure.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Well-formed JSON whose shape does not match the document model.
class StructuralError : public Error {
 public:
  StructuralError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Precondition violated (empty input where one is required, unknown token...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two property entries map to the same logical field with different values.
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

class KeyError : public Error {
 public:
  using Error::Error;
};

}  // namespace aibom

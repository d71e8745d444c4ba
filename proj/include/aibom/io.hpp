#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace aibom {

/// Whole-file read. Throws IoError naming the path when the file is missing,
/// is a directory, or cannot be read.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partially written file. `owner_only` restricts the file
/// to mode 0600 before any content is written (used for key material).
void write_file_atomic(const std::filesystem::path& path, std::string_view contents,
                       bool owner_only = false);

}  // namespace aibom

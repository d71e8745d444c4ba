#pragma once

// Small value types and text encodings shared by every module: hex and
// base64 codecs, SHA-256 digests, UUIDs, RFC 3339 timestamps and URLs.

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aibom {

using Bytes = std::vector<std::uint8_t>;

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Accepts either case; returns nullopt on odd length or non-hex input.
std::optional<Bytes> from_hex(std::string_view text);
/// True when `text` is exactly `length` characters of [0-9a-f].
bool is_lower_hex(std::string_view text, std::size_t length);
std::string to_lower_ascii(std::string_view text);

/// Standard alphabet, padded, no line breaks.
std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Accepts padded and unpadded input; rejects anything outside the alphabet.
std::optional<Bytes> base64_decode(std::string_view text);

inline std::span<const std::uint8_t> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

class Sha256Digest {
 public:
  static constexpr std::size_t kSize = 32;
  static constexpr std::string_view kPrefix = "sha256:";

  Sha256Digest() = default;
  explicit Sha256Digest(const std::array<std::uint8_t, kSize>& raw) : raw_(raw) {}

  /// 64 hex characters, either case.
  static std::optional<Sha256Digest> from_hex(std::string_view hex);
  /// "sha256:" followed by 64 hex characters.
  static std::optional<Sha256Digest> from_prefixed(std::string_view text);

  std::string hex() const;
  std::string prefixed() const { return std::string(kPrefix) + hex(); }
  const std::array<std::uint8_t, kSize>& raw() const noexcept { return raw_; }
  std::array<std::uint8_t, kSize>& raw() noexcept { return raw_; }

  friend auto operator<=>(const Sha256Digest&, const Sha256Digest&) = default;

 private:
  std::array<std::uint8_t, kSize> raw_{};
};

/// RFC 4122 textual UUID, stored canonically as lowercase hyphenated text.
class Uuid {
 public:
  static std::optional<Uuid> parse(std::string_view text);
  static Uuid random();
  const std::string& str() const noexcept { return text_; }
  friend bool operator==(const Uuid&, const Uuid&) = default;

 private:
  explicit Uuid(std::string text) : text_(std::move(text)) {}
  std::string text_;
};

/// RFC 3339 date-time, e.g. 2025-06-20T14:30:00Z or 2025-06-20T14:30:00.25+01:00.
bool is_rfc3339(std::string_view text);
/// Renders UTC with second precision and a trailing Z.
std::string format_rfc3339(std::chrono::system_clock::time_point t);
std::string now_rfc3339();

/// scheme "://" authority [path...], no whitespace.
bool is_absolute_url(std::string_view text);

}  // namespace aibom

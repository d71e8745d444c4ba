#pragma once

#include <istream>
#include <memory>
#include <span>
#include <string_view>

#include "aibom/encoding.hpp"

namespace aibom {

/// Incremental SHA-256.
class Sha256Hasher {
 public:
  Sha256Hasher();
  ~Sha256Hasher();
  Sha256Hasher(const Sha256Hasher&) = delete;
  Sha256Hasher& operator=(const Sha256Hasher&) = delete;
  Sha256Hasher(Sha256Hasher&&) noexcept;
  Sha256Hasher& operator=(Sha256Hasher&&) noexcept;

  void update(std::span<const std::uint8_t> data);
  void update(std::string_view data) { update(as_bytes(data)); }
  Sha256Digest finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Sha256Digest sha256(std::span<const std::uint8_t> data);
inline Sha256Digest sha256(std::string_view data) { return sha256(as_bytes(data)); }

/// HMAC-SHA-256. An empty key is permitted here; callers enforce policy.
Sha256Digest hmac_sha256(std::span<const std::uint8_t> key,
                         std::span<const std::uint8_t> data);

/// Fills `out` from the OS CSPRNG.
void secure_random(std::span<std::uint8_t> out);

}  // namespace aibom

#pragma once

// Document signatures (Ed25519, ECDSA P-256) over the canonical byte form,
// and HMAC job bindings tying a document to a job UUID and a researcher key.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "aibom/encoding.hpp"
#include "aibom/model.hpp"

namespace aibom {

enum class SignatureAlgorithm { kEd25519, kEcdsaP256 };

/// Accepts "Ed25519", "ECDSA-P256" and "ECDSA". Throws DomainError otherwise.
SignatureAlgorithm parse_signature_algorithm(std::string_view name);
/// Name written into signature envelopes: "Ed25519" or "ECDSA".
std::string_view envelope_name(SignatureAlgorithm alg);

/// Byte buffer wiped on destruction.
class SecretBytes {
 public:
  SecretBytes() = default;
  explicit SecretBytes(Bytes bytes) : bytes_(std::move(bytes)) {}
  SecretBytes(const SecretBytes&) = default;
  SecretBytes& operator=(const SecretBytes&) = default;
  SecretBytes(SecretBytes&&) noexcept = default;
  SecretBytes& operator=(SecretBytes&&) noexcept = default;
  ~SecretBytes();

  std::span<const std::uint8_t> view() const noexcept { return bytes_; }
  bool empty() const noexcept { return bytes_.empty(); }

 private:
  Bytes bytes_;
};

struct KeyPair {
  SignatureAlgorithm alg = SignatureAlgorithm::kEd25519;
  /// Ed25519: the 32-byte seed. ECDSA: PKCS#8 DER.
  SecretBytes private_key;
  /// Ed25519: raw 32 bytes. ECDSA: SubjectPublicKeyInfo DER. Base64.
  std::string public_key;
};

KeyPair generate_keypair(std::string_view alg);
/// Rebuilds the public half from `private_key`; throws KeyError on bad material.
KeyPair keypair_from_private(SignatureAlgorithm alg, SecretBytes private_key);
/// Key file: a 32-byte raw Ed25519 seed, or an ECDSA P-256 private key in
/// DER/PEM (SEC1 or PKCS#8, optionally passphrase-encrypted).
KeyPair load_keypair(const std::filesystem::path& path,
                     std::optional<std::string> passphrase = std::nullopt);
/// Bytes suitable for load_keypair.
Bytes key_file_bytes(const KeyPair& key);

/// Copy of `doc` carrying an envelope whose signature covers
/// serialize_canonical(doc). `at` must be an RFC 3339 date-time.
AibomDocument sign_document(const AibomDocument& doc, const KeyPair& key, std::string at);
/// Throws DomainError if the document has no envelope. Any malformed
/// envelope content yields false.
bool verify_document(const AibomDocument& doc);

struct JobBinding {
  Uuid job_uuid;
  std::string mac;  ///< 64 lowercase hex characters
  std::string key_id;
};

/// Short identifier derived from a credential key (hex SHA-256 prefix).
std::string credential_key_id(std::span<const std::uint8_t> key);

/// mac = HMAC-SHA-256(key, serialize_canonical(doc) || uuid text).
/// Throws DomainError on an empty key.
JobBinding bind_job(const AibomDocument& doc, const Uuid& job_uuid,
                    std::span<const std::uint8_t> credential_key);
bool verify_job(const AibomDocument& doc, const JobBinding& binding,
                std::span<const std::uint8_t> credential_key);

Json to_json(const JobBinding& binding);

}  // namespace aibom

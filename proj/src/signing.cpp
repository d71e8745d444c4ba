#include "aibom/signing.hpp"

#include <openssl/bio.h>
#include <openssl/core_names.h>
#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/pem.h>
#include <openssl/x509.h>

#include <memory>

#include "aibom/crypto.hpp"
#include "aibom/errors.hpp"
#include "aibom/io.hpp"

namespace aibom {
namespace {

constexpr std::size_t kEd25519Size = 32;

struct PkeyFree {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct MdCtxFree {
  void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
struct BioFree {
  void operator()(BIO* p) const { BIO_free(p); }
};
struct P8Free {
  void operator()(PKCS8_PRIV_KEY_INFO* p) const { PKCS8_PRIV_KEY_INFO_free(p); }
};
using Pkey = std::unique_ptr<EVP_PKEY, PkeyFree>;
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxFree>;
using Bio = std::unique_ptr<BIO, BioFree>;

bool is_p256(EVP_PKEY* key) {
  if (EVP_PKEY_is_a(key, "EC") != 1) return false;
  char group[64] = {};
  std::size_t len = 0;
  if (EVP_PKEY_get_utf8_string_param(key, OSSL_PKEY_PARAM_GROUP_NAME, group, sizeof group, &len) != 1)
    return false;
  const std::string_view g(group, len);
  return g == "prime256v1" || g == "P-256";
}

Pkey ed25519_private(std::span<const std::uint8_t> seed) {
  if (seed.size() != kEd25519Size) throw KeyError("Ed25519 seed must be 32 bytes");
  Pkey key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(), seed.size()));
  if (!key) throw KeyError("invalid Ed25519 seed");
  return key;
}

Pkey ecdsa_private(std::span<const std::uint8_t> der,
                   const std::optional<std::string>& passphrase = std::nullopt) {
  Pkey key;
  {
    const unsigned char* p = der.data();
    key.reset(d2i_AutoPrivateKey(nullptr, &p, static_cast<long>(der.size())));
  }
  if (!key) {
    Bio bio(BIO_new_mem_buf(der.data(), static_cast<int>(der.size())));
    const char* pass = passphrase ? passphrase->c_str() : "";
    key.reset(d2i_PKCS8PrivateKey_bio(bio.get(), nullptr, nullptr, const_cast<char*>(pass)));
  }
  if (!key) {
    Bio bio(BIO_new_mem_buf(der.data(), static_cast<int>(der.size())));
    const char* pass = passphrase ? passphrase->c_str() : "";
    key.reset(PEM_read_bio_PrivateKey(bio.get(), nullptr, nullptr, const_cast<char*>(pass)));
  }
  if (!key) throw KeyError("unreadable ECDSA private key");
  if (!is_p256(key.get())) throw KeyError("ECDSA key is not on curve P-256");
  return key;
}

Bytes pkcs8_der(EVP_PKEY* key) {
  std::unique_ptr<PKCS8_PRIV_KEY_INFO, P8Free> info(EVP_PKEY2PKCS8(key));
  if (!info) throw KeyError("cannot encode private key");
  const int len = i2d_PKCS8_PRIV_KEY_INFO(info.get(), nullptr);
  if (len <= 0) throw KeyError("cannot encode private key");
  Bytes out(static_cast<std::size_t>(len));
  unsigned char* p = out.data();
  i2d_PKCS8_PRIV_KEY_INFO(info.get(), &p);
  return out;
}

std::string public_key_b64(SignatureAlgorithm alg, EVP_PKEY* key) {
  if (alg == SignatureAlgorithm::kEd25519) {
    std::array<std::uint8_t, kEd25519Size> pub{};
    std::size_t len = pub.size();
    if (EVP_PKEY_get_raw_public_key(key, pub.data(), &len) != 1 || len != pub.size())
      throw KeyError("cannot derive Ed25519 public key");
    return base64_encode(pub);
  }
  const int len = i2d_PUBKEY(key, nullptr);
  if (len <= 0) throw KeyError("cannot encode ECDSA public key");
  Bytes der(static_cast<std::size_t>(len));
  unsigned char* p = der.data();
  i2d_PUBKEY(key, &p);
  return base64_encode(der);
}

Pkey private_pkey(const KeyPair& key) {
  return key.alg == SignatureAlgorithm::kEd25519 ? ed25519_private(key.private_key.view())
                                                 : ecdsa_private(key.private_key.view());
}

Bytes sign_bytes(SignatureAlgorithm alg, EVP_PKEY* key, std::string_view message) {
  MdCtx ctx(EVP_MD_CTX_new());
  const EVP_MD* md = alg == SignatureAlgorithm::kEd25519 ? nullptr : EVP_sha256();
  if (!ctx || EVP_DigestSignInit(ctx.get(), nullptr, md, nullptr, key) != 1)
    throw KeyError("signing initialisation failed");
  const auto* msg = reinterpret_cast<const unsigned char*>(message.data());
  std::size_t len = 0;
  if (EVP_DigestSign(ctx.get(), nullptr, &len, msg, message.size()) != 1)
    throw KeyError("signing failed");
  Bytes sig(len);
  if (EVP_DigestSign(ctx.get(), sig.data(), &len, msg, message.size()) != 1)
    throw KeyError("signing failed");
  sig.resize(len);
  return sig;
}

}  // namespace

SecretBytes::~SecretBytes() {
  if (!bytes_.empty()) OPENSSL_cleanse(bytes_.data(), bytes_.size());
}

SignatureAlgorithm parse_signature_algorithm(std::string_view name) {
  if (name == "Ed25519") return SignatureAlgorithm::kEd25519;
  if (name == "ECDSA" || name == "ECDSA-P256") return SignatureAlgorithm::kEcdsaP256;
  throw DomainError("unsupported signature algorithm: " + std::string(name));
}

std::string_view envelope_name(SignatureAlgorithm alg) {
  return alg == SignatureAlgorithm::kEd25519 ? "Ed25519" : "ECDSA";
}

KeyPair generate_keypair(std::string_view alg_name) {
  const auto alg = parse_signature_algorithm(alg_name);
  if (alg == SignatureAlgorithm::kEd25519) {
    Bytes seed(kEd25519Size);
    secure_random(seed);
    return keypair_from_private(alg, SecretBytes(std::move(seed)));
  }
  Pkey key(EVP_PKEY_Q_keygen(nullptr, nullptr, "EC", "P-256"));
  if (!key) throw KeyError("ECDSA key generation failed");
  return KeyPair{alg, SecretBytes(pkcs8_der(key.get())), public_key_b64(alg, key.get())};
}

KeyPair keypair_from_private(SignatureAlgorithm alg, SecretBytes private_key) {
  KeyPair kp{alg, std::move(private_key), {}};
  Pkey key = private_pkey(kp);
  kp.public_key = public_key_b64(alg, key.get());
  return kp;
}

KeyPair load_keypair(const std::filesystem::path& path, std::optional<std::string> passphrase) {
  const std::string raw = read_file(path);
  const auto bytes = as_bytes(raw);
  if (bytes.size() == kEd25519Size)
    return keypair_from_private(SignatureAlgorithm::kEd25519, SecretBytes(Bytes(bytes.begin(), bytes.end())));
  Pkey key = ecdsa_private(bytes, passphrase);
  return KeyPair{SignatureAlgorithm::kEcdsaP256, SecretBytes(pkcs8_der(key.get())),
                 public_key_b64(SignatureAlgorithm::kEcdsaP256, key.get())};
}

Bytes key_file_bytes(const KeyPair& key) {
  const auto v = key.private_key.view();
  return Bytes(v.begin(), v.end());
}

AibomDocument sign_document(const AibomDocument& doc, const KeyPair& key, std::string at) {
  if (!is_rfc3339(at)) throw DomainError("signature timestamp is not RFC 3339: " + at);
  Pkey pkey = private_pkey(key);
  AibomDocument signed_doc = doc;
  signed_doc.signature.reset();
  const Bytes sig = sign_bytes(key.alg, pkey.get(), serialize_canonical(signed_doc));
  SignatureEnvelope env;
  if (doc.signature) env.extra = doc.signature->extra;
  env.alg = std::string(envelope_name(key.alg));
  env.public_key = key.public_key;
  env.signature = base64_encode(sig);
  env.timestamp = std::move(at);
  signed_doc.signature = std::move(env);
  return signed_doc;
}

bool verify_document(const AibomDocument& doc) {
  if (!doc.signature) throw DomainError("document carries no signature envelope");
  const SignatureEnvelope& env = *doc.signature;
  SignatureAlgorithm alg;
  try {
    alg = parse_signature_algorithm(env.alg);
  } catch (const DomainError&) {
    return false;
  }
  const auto pub = base64_decode(env.public_key);
  const auto sig = base64_decode(env.signature);
  if (!pub || !sig) return false;

  Pkey key;
  if (alg == SignatureAlgorithm::kEd25519) {
    if (pub->size() != kEd25519Size) return false;
    key.reset(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, pub->data(), pub->size()));
  } else {
    const unsigned char* p = pub->data();
    key.reset(d2i_PUBKEY(nullptr, &p, static_cast<long>(pub->size())));
    if (key && !is_p256(key.get())) return false;
  }
  if (!key) return false;

  const std::string message = serialize_canonical(doc);
  MdCtx ctx(EVP_MD_CTX_new());
  const EVP_MD* md = alg == SignatureAlgorithm::kEd25519 ? nullptr : EVP_sha256();
  if (!ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, md, nullptr, key.get()) != 1) return false;
  return EVP_DigestVerify(ctx.get(), sig->data(), sig->size(),
                          reinterpret_cast<const unsigned char*>(message.data()),
                          message.size()) == 1;
}

std::string credential_key_id(std::span<const std::uint8_t> key) {
  return sha256(key).hex().substr(0, 16);
}

JobBinding bind_job(const AibomDocument& doc, const Uuid& job_uuid,
                    std::span<const std::uint8_t> credential_key) {
  if (credential_key.empty()) throw DomainError("credential key must not be empty");
  const std::string payload = serialize_canonical(doc) + job_uuid.str();
  return JobBinding{job_uuid, hmac_sha256(credential_key, as_bytes(payload)).hex(),
                    credential_key_id(credential_key)};
}

bool verify_job(const AibomDocument& doc, const JobBinding& binding,
                std::span<const std::uint8_t> credential_key) {
  if (credential_key.empty()) return false;
  const auto expected = bind_job(doc, binding.job_uuid, credential_key);
  const auto got = from_hex(binding.mac);
  const auto want = from_hex(expected.mac);
  return got && got->size() == want->size() &&
         CRYPTO_memcmp(got->data(), want->data(), got->size()) == 0;
}

Json to_json(const JobBinding& b) {
  return {{"jobUuid", b.job_uuid.str()}, {"mac", b.mac}, {"keyId", b.key_id}};
}

}  // namespace aibom

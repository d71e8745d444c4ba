#pragma once

// Fixture access and synthetic document generators shared by the unit and
// acceptance tests.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "aibom/matcher.hpp"
#include "aibom/model.hpp"
#include "aibom/signing.hpp"

namespace testing_support {

std::filesystem::path fixture_path(const std::string& relative);
std::string read_fixture(const std::string& relative);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  void write(const std::string& name, const std::string& contents) const;

 private:
  std::filesystem::path path_;
};

/// `key` re-encoded as a passphrase-protected PKCS#8 PEM (AES-256-CBC).
std::string encrypted_pem(const aibom::KeyPair& key, const std::string& passphrase);

std::string random_hex(std::mt19937_64& rng, std::size_t length);
std::string random_text(std::mt19937_64& rng, std::size_t max_length);

/// A lenient-valid document: application root, one ai-model, then
/// `libraries` library components with random names, digests and
/// properties (including non-ASCII text).
aibom::AibomDocument random_document(std::mt19937_64& rng, std::size_t libraries);

/// `n` library components named lib-0000.. with digest sha256(name).
aibom::AibomDocument replay_fixture(std::size_t n);
/// Copy of `doc` in which exactly `k` distinct components (chosen by `rng`)
/// carry a different digest.
aibom::AibomDocument inject_drift(const aibom::AibomDocument& doc, std::size_t k, std::mt19937_64& rng);

/// `total` components in doc.components; the first chain nests `depth`
/// levels deep, the rest are siblings at the top level.
aibom::Json stress_document(std::size_t total, std::size_t depth);

/// The labelled CVE-matching corpus under cve-oracle/, turned into a
/// document, normalised records and truth labels. `lattice` lists the
/// pkg-a versions in precedence order, as written in the fixture.
struct CveOracleCorpus {
  std::vector<std::string> lattice;
  aibom::AibomDocument doc;
  std::vector<aibom::CveRecord> records;
  std::vector<aibom::TruthLabel> truth;
  aibom::Json expected;
  aibom::Json raw;
};
CveOracleCorpus load_cve_oracle_corpus();

}  // namespace testing_support

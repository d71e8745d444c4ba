#include "fixtures.hpp"

#include <openssl/evp.h>
#include <openssl/pem.h>
#include <openssl/x509.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "aibom/crypto.hpp"

#ifndef AIBOM_TEST_FIXTURE_DIR
#error "AIBOM_TEST_FIXTURE_DIR must be defined by the build"
#endif

namespace testing_support {

using aibom::AibomDocument;
using aibom::ComponentRecord;

std::filesystem::path fixture_path(const std::string& relative) {
  return std::filesystem::path(AIBOM_TEST_FIXTURE_DIR) / relative;
}

std::string read_fixture(const std::string& relative) {
  std::ifstream in(fixture_path(relative), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture: " + relative);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TempDir::TempDir() {
  std::random_device rd;
  std::mt19937_64 rng((static_cast<std::uint64_t>(rd()) << 32) ^ rd());
  path_ = std::filesystem::temp_directory_path() / ("aibom-test-" + random_hex(rng, 12));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void TempDir::write(const std::string& name, const std::string& contents) const {
  const auto p = path_ / name;
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << contents;
}

std::string encrypted_pem(const aibom::KeyPair& key, const std::string& passphrase) {
  const aibom::Bytes der = aibom::key_file_bytes(key);
  const unsigned char* p = der.data();
  EVP_PKEY* pkey = d2i_AutoPrivateKey(nullptr, &p, static_cast<long>(der.size()));
  if (!pkey) throw std::runtime_error("encrypted_pem: key did not decode");
  BIO* bio = BIO_new(BIO_s_mem());
  const int ok = PEM_write_bio_PKCS8PrivateKey(bio, pkey, EVP_aes_256_cbc(), passphrase.data(),
                                               static_cast<int>(passphrase.size()), nullptr, nullptr);
  char* data = nullptr;
  const long n = BIO_get_mem_data(bio, &data);
  std::string pem(data, static_cast<std::size_t>(n));
  BIO_free(bio);
  EVP_PKEY_free(pkey);
  if (ok != 1) throw std::runtime_error("encrypted_pem: PEM encoding failed");
  return pem;
}

std::string random_hex(std::mt19937_64& rng, std::size_t length) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s(length, '0');
  for (auto& c : s) c = kHex[rng() % 16];
  return s;
}

std::string random_text(std::mt19937_64& rng, std::size_t max_length) {
  static const std::vector<std::string> kPieces = {"a", "Z", "7", " ", "-", "_", "\"", "\\", "/", "\xc3\xa9",
                                                   "\xe2\x82\xac", "\xf0\x9f\x94\x92", "\t", "\n", "x"};
  std::string s;
  const std::size_t n = rng() % (max_length + 1);
  for (std::size_t i = 0; i < n; ++i) s += kPieces[rng() % kPieces.size()];
  return s;
}

namespace {

ComponentRecord library(std::string name, std::string version, std::string digest_hex) {
  ComponentRecord c;
  c.type = "library";
  c.purl = "pkg:pypi/" + name + "@" + version;
  c.name = std::move(name);
  c.version = std::move(version);
  c.hashes.push_back({"SHA-256", std::move(digest_hex)});
  c.properties.emplace();
  c.set_property("x-sacrospec-ecosystem", "pypi");
  return c;
}

AibomDocument skeleton() {
  AibomDocument doc;
  doc.metadata.timestamp = "2025-06-20T14:30:00Z";
  doc.metadata.tools.push_back({"SACRO", "AIBOM Generator", "1.0.0"});
  doc.metadata.component.type = "application";
  doc.metadata.component.name = "fixture-job";
  doc.metadata.component.version = "1.0.0";
  doc.metadata.component.hashes.push_back({"SHA-256", aibom::sha256("fixture-job").hex()});
  return doc;
}

}  // namespace

AibomDocument random_document(std::mt19937_64& rng, std::size_t libraries) {
  AibomDocument doc = skeleton();
  doc.version = 1 + static_cast<std::int64_t>(rng() % 50);
  doc.metadata.component.name = "job " + random_text(rng, 12);

  ComponentRecord model;
  model.type = "ai-model";
  model.name = "model-" + random_hex(rng, 6);
  model.version = std::to_string(rng() % 10) + ".0.0";
  const std::string digest = random_hex(rng, 64);
  model.hashes.push_back({"SHA-256", digest});
  model.properties.emplace();
  model.set_property("x-sacrospec-modelReference", digest);
  model.set_property("x-sacrospec-trainingDataSource", random_text(rng, 20));
  model.set_property("x-sacrospec-disclosureControlType", "cell-suppression");
  doc.components.push_back(std::move(model));

  for (std::size_t i = 0; i < libraries; ++i) {
    ComponentRecord c = library("lib-" + random_hex(rng, 8), std::to_string(rng() % 5) + "." +
                                                                 std::to_string(rng() % 20) + "." +
                                                                 std::to_string(rng() % 9),
                                random_hex(rng, 64));
    c.set_property("x-sacrospec-note", random_text(rng, 16));
    doc.components.push_back(std::move(c));
  }
  return doc;
}

AibomDocument replay_fixture(std::size_t n) {
  AibomDocument doc = skeleton();
  for (std::size_t i = 0; i < n; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "lib-%04zu", i);
    doc.components.push_back(library(name, "1.0.0", aibom::sha256(name).hex()));
  }
  return doc;
}

AibomDocument inject_drift(const AibomDocument& doc, std::size_t k, std::mt19937_64& rng) {
  if (k > doc.components.size()) throw std::invalid_argument("inject_drift: k exceeds component count");
  std::vector<std::size_t> idx(doc.components.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  AibomDocument out = doc;
  for (std::size_t i = 0; i < k; ++i) {
    auto& h = out.components[idx[i]].hashes.at(0).content;
    h = aibom::sha256("drift:" + h).hex();
  }
  return out;
}

aibom::Json stress_document(std::size_t total, std::size_t depth) {
  using aibom::Json;
  auto component = [](std::size_t i) {
    const std::string name = "pkg-" + std::to_string(i);
    return Json{{"type", "library"},
                {"name", name},
                {"version", "1." + std::to_string(i % 100) + ".0"},
                {"purl", "pkg:pypi/" + name + "@1." + std::to_string(i % 100) + ".0"},
                {"hashes", Json::array({{{"alg", "SHA-256"}, {"content", aibom::sha256(name).hex()}}})},
                {"properties", Json::array({{{"name", "x-sacrospec-ecosystem"}, {"value", "pypi"}}})}};
  };
  Json doc = {{"bomFormat", "CycloneDX"},
              {"specVersion", "1.5"},
              {"version", 1},
              {"metadata",
               {{"timestamp", "2025-06-20T14:30:00Z"},
                {"tools", Json::array({{{"vendor", "SACRO"}, {"name", "AIBOM Generator"}, {"version", "1.0.0"}}})},
                {"component",
                 {{"type", "application"},
                  {"name", "stress"},
                  {"version", "1.0.0"},
                  {"hashes", Json::array({{{"alg", "SHA-256"}, {"content", aibom::sha256("stress").hex()}}})}}}}},
              {"components", Json::array()}};
  // Build the deep chain innermost-first.
  Json chain = component(depth - 1);
  for (std::size_t level = depth - 1; level-- > 0;) {
    Json parent = component(level);
    parent["components"] = Json::array({chain});
    chain = std::move(parent);
  }
  doc["components"].push_back(std::move(chain));
  for (std::size_t i = depth; i < total; ++i) doc["components"].push_back(component(i));
  return doc;
}

CveOracleCorpus load_cve_oracle_corpus() {
  using aibom::Json;
  CveOracleCorpus c;
  c.raw = Json::parse(read_fixture("cve-oracle/corpus.json"));
  c.lattice = c.raw.at("lattice").get<std::vector<std::string>>();
  c.expected = c.raw.at("expected");

  c.doc = skeleton();
  c.doc.metadata.component.name = "cve-oracle-job";
  for (const auto& j : c.raw.at("components")) {
    const std::string name = j.at("name");
    const std::string version = j.at("version");
    ComponentRecord comp = library(name, version, aibom::sha256(name + "@" + version).hex());
    if (j.at("purl").is_null()) comp.purl.reset();
    else comp.purl = j.at("purl").get<std::string>();
    c.doc.components.push_back(std::move(comp));
  }

  for (const auto& j : c.raw.at("records")) {
    aibom::CveRecord r;
    r.id = j.at("id");
    r.source = "osv";
    r.summary = "oracle corpus record " + r.id;
    if (!j.at("cvss").is_null()) r.cvss_score = j.at("cvss").get<double>();
    const Json& iv = j.at("interval");
    aibom::VersionInterval interval;
    if (!iv.at("lower").is_null()) interval.lower = iv.at("lower").get<std::string>();
    interval.lower_inclusive = iv.at("lowerInclusive");
    if (!iv.at("upper").is_null()) interval.upper = iv.at("upper").get<std::string>();
    interval.upper_inclusive = iv.at("upperInclusive");
    aibom::VersionConstraint range;
    range.add_interval(interval);
    r.affected.push_back({"pypi", j.at("package").get<std::string>(), range});
    c.records.push_back(std::move(r));
  }

  for (const auto& j : c.raw.at("truth"))
    c.truth.push_back({{j.at("name"), j.at("version")}, j.at("cve"), j.at("vulnerable")});
  return c;
}

}  // namespace testing_support

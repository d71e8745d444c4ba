#pragma once

// Vulnerability records and the sources that supply them: the OSV batch
// API, the NVD CVE API 2.0, and an offline fixture directory that stores
// responses in the same native formats.

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aibom/errors.hpp"
#include "aibom/identifiers.hpp"
#include "aibom/model.hpp"
#include "aibom/version_range.hpp"

namespace aibom {

struct AffectedConstraint {
  /// pypi, conda, deb, other, or "cpe" for NVD configurations.
  std::string ecosystem;
  /// Normalised package name; "vendor:product" for cpe.
  std::string name;
  VersionConstraint range;
  friend bool operator==(const AffectedConstraint&, const AffectedConstraint&) = default;
};

struct CveRecord {
  std::string id;
  std::vector<std::string> aliases;
  std::string summary;
  std::optional<double> cvss_score;
  std::vector<AffectedConstraint> affected;
  std::string source;  ///< "osv" or "nvd"
  friend bool operator==(const CveRecord&, const CveRecord&) = default;
};

/// Maps OSV ecosystem names ("PyPI", "Debian:12") to ecosystem tokens.
std::string osv_ecosystem_token(std::string_view osv_ecosystem);
/// Normalised package name for a constraint in `ecosystem`.
std::string normalize_package_name(std::string_view ecosystem, std::string_view name);

/// One OSV vulnerability object (as returned by GET /v1/vulns/{id}).
CveRecord normalize_osv(const Json& vuln);
/// One element of an NVD CVE API 2.0 "vulnerabilities" array.
CveRecord normalize_nvd(const Json& item);

Json to_json(const CveRecord& record);
CveRecord cve_record_from_json(const Json& j);

/// Merges records sharing an id (or an alias of one another). The scored
/// entry wins; between two scored entries NVD supplies the score and OSV
/// the ranges for any package both describe.
std::vector<CveRecord> merge_records(std::vector<CveRecord> records);

class SourceUnavailableError : public Error {
 public:
  SourceUnavailableError(const std::string& what, std::vector<CveRecord> partial)
      : Error(what), partial_(std::move(partial)) {}
  const std::vector<CveRecord>& partial() const noexcept { return partial_; }

 private:
  std::vector<CveRecord> partial_;
};

/// Identity of a published artifact, keyed by its SHA-256 digest.
struct KnownArtifact {
  std::string ecosystem;
  std::string name;
  std::string version;
};
using KnownArtifactIndex = std::map<Sha256Digest, KnownArtifact>;

/// A client for OSV/NVD data.
class VulnerabilitySource {
 public:
  virtual ~VulnerabilitySource() = default;
  /// At most kOsvBatchLimit purls per call.
  virtual std::vector<CveRecord> fetch_osv(const std::vector<Purl>& batch) = 0;
  virtual std::vector<CveRecord> fetch_nvd(const CpeId& cpe) = 0;
  /// Resolves a single advisory id.
  virtual std::optional<CveRecord> lookup(std::string_view id) = 0;
  virtual const KnownArtifactIndex* known_artifacts() const { return nullptr; }
};

inline constexpr std::size_t kOsvBatchLimit = 1000;

/// Batches purls (<= 1000 per call) and deduplicates by id. If a batch
/// fails, throws SourceUnavailableError carrying the records gathered so far.
std::vector<CveRecord> query_osv(const std::vector<Purl>& purls, VulnerabilitySource& client);
std::vector<CveRecord> query_nvd(const std::vector<CpeId>& cpes, VulnerabilitySource& client);

/// Fixture directory: one JSON file per key, named by fixture_file_name().
/// {"key": "<purl or cpe>", "source": "osv", "vulns": [<OSV vuln>...]} or
/// {"key": "<cpe>", "source": "nvd", "vulnerabilities": [<NVD item>...]}.
/// An optional known-artifacts.json lists
/// {"artifacts": [{"sha256", "ecosystem", "name", "version"}]}.
class OfflineFixtureSource : public VulnerabilitySource {
 public:
  /// Throws IoError if the directory is missing, StructuralError on bad fixtures.
  explicit OfflineFixtureSource(const std::filesystem::path& dir);

  std::vector<CveRecord> fetch_osv(const std::vector<Purl>& batch) override;
  std::vector<CveRecord> fetch_nvd(const CpeId& cpe) override;
  std::optional<CveRecord> lookup(std::string_view id) override;
  const KnownArtifactIndex* known_artifacts() const override { return &artifacts_; }

 private:
  std::map<std::string, std::vector<CveRecord>, std::less<>> by_key_;
  std::map<std::string, CveRecord, std::less<>> by_id_;
  KnownArtifactIndex artifacts_;
};

/// Percent-encodes everything outside [A-Za-z0-9._-] and appends ".json".
std::string fixture_file_name(std::string_view key);

struct HttpResponse {
  int status = 0;  ///< 0 when no response was received
  std::string body;
  std::string error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& url,
                           const std::map<std::string, std::string>& headers) = 0;
  virtual HttpResponse post(const std::string& url, const std::string& body,
                            const std::map<std::string, std::string>& headers) = 0;
};

/// HTTPS transport backed by cpp-httplib.
std::unique_ptr<HttpTransport> make_http_transport(std::chrono::seconds timeout = std::chrono::seconds(30));

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_delay{500};
  double multiplier = 2.0;
  std::function<void(std::chrono::milliseconds)> sleep;  ///< defaults to this_thread::sleep_for
};

struct LiveSourceOptions {
  std::string osv_base = "https://api.osv.dev";
  std::string nvd_base = "https://services.nvd.nist.gov";
  std::optional<std::string> nvd_api_key;
  RetryPolicy retry;
  std::size_t max_in_flight = 4;
  std::size_t nvd_page_size = 2000;
};

class LiveSource : public VulnerabilitySource {
 public:
  LiveSource(HttpTransport& transport, LiveSourceOptions options);

  std::vector<CveRecord> fetch_osv(const std::vector<Purl>& batch) override;
  std::vector<CveRecord> fetch_nvd(const CpeId& cpe) override;
  std::optional<CveRecord> lookup(std::string_view id) override;

 private:
  /// Retries transient failures (no response, 429, 403 rate limits, 5xx)
  /// with exponential backoff.
  HttpResponse with_retry(const std::function<HttpResponse()>& request, const std::string& what);
  std::optional<CveRecord> osv_vuln(const std::string& id);

  HttpTransport& transport_;
  LiveSourceOptions options_;
};

/// Advisory id from an OSV/NVD reference URL
/// ("https://osv.dev/vulnerability/CVE-2023-2953" -> "CVE-2023-2953").
std::optional<std::string> advisory_id_from_url(std::string_view url);

}  // namespace aibom

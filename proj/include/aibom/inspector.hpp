#pragma once

// Static dependency enumeration (pip, conda, dpkg), runtime import-log
// ingestion, model-state capture, and the three-stage snapshots.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "aibom/model.hpp"
#include "aibom/provenance.hpp"

namespace aibom {

enum class Ecosystem { kPypi, kConda, kDeb, kOther };

std::string_view to_string(Ecosystem e);
/// "pypi", "conda", "deb", "other"; nullopt for anything else.
std::optional<Ecosystem> parse_ecosystem(std::string_view token);

struct DependencyDecl {
  Ecosystem ecosystem = Ecosystem::kOther;
  std::string name;
  std::optional<std::string> version;
  /// Manifest path and line, or log id, plus bracketed annotations such as
  /// "[unpinned >=2.0]" or "[conflict: 1.2 from b.txt:4]".
  std::string source;
  friend bool operator==(const DependencyDecl&, const DependencyDecl&) = default;
};

/// requirements.txt format. Never throws; unrecognised lines become
/// ecosystem "other" declarations carrying the raw text as name.
std::vector<DependencyDecl> parse_pip_manifest(std::string_view text,
                                               std::string_view source = "requirements.txt");
/// environment.yml format. Throws ParseError on invalid YAML or when the
/// document is not a mapping with a list of dependencies.
std::vector<DependencyDecl> parse_conda_env(std::string_view text,
                                            std::string_view source = "environment.yml");
/// /var/lib/dpkg/status format; only "install ok installed" stanzas count.
std::vector<DependencyDecl> parse_dpkg_status(std::string_view text,
                                              std::string_view source = "dpkg-status");

struct ImportLogResult {
  std::vector<DependencyDecl> declarations;
  std::size_t malformed = 0;
  std::vector<std::size_t> malformed_lines;  ///< 1-based
};

/// Lines of the form "IMPORT <ecosystem> <name> <version>". Blank lines and
/// '#' comments are ignored; anything else is counted as malformed.
ImportLogResult ingest_runtime_import_log(std::string_view text,
                                          std::string_view log_id = "runtime-import-log");

struct ModelStateRecord {
  std::string architecture;
  std::optional<std::uint64_t> parameter_count;
  ArtifactDigest file_checksum;
  std::map<std::string, std::string> hyperparameters;
};

ModelStateRecord capture_model_state(const std::filesystem::path& model_file,
                                     std::string architecture,
                                     std::optional<std::uint64_t> parameter_count = std::nullopt,
                                     std::map<std::string, std::string> hyperparameters = {});

/// ai-model component with the file hash, a modelReference property and the
/// captured state as extension properties.
ComponentRecord model_state_to_component(const ModelStateRecord& state, std::string name,
                                         std::string version);

enum class Stage { kPreLoad, kRuntime, kPostExecution };

std::string_view to_string(Stage s);
/// "pre-load", "runtime", "post-execution". Throws DomainError otherwise.
Stage parse_stage(std::string_view token);

struct SnapshotCapture {
  Stage stage = Stage::kPreLoad;
  std::string timestamp;
  std::vector<DependencyDecl> dependencies;
  std::vector<ArtifactDigest> artifacts;
};

/// Deduplicates by (ecosystem, name) keeping the first occurrence; a later
/// entry with a different version is recorded as a conflict annotation on
/// the retained one. Output is sorted by (name, ecosystem).
SnapshotCapture capture_snapshot(Stage stage, const std::vector<DependencyDecl>& deps,
                                 std::vector<ArtifactDigest> artifacts, std::string at);

struct VersionChange {
  Ecosystem ecosystem;
  std::string name;
  std::optional<std::string> from;
  std::optional<std::string> to;
  friend bool operator==(const VersionChange&, const VersionChange&) = default;
};

struct SnapshotDiff {
  std::vector<DependencyDecl> added;
  std::vector<DependencyDecl> removed;
  std::vector<VersionChange> version_changed;
  bool empty() const { return added.empty() && removed.empty() && version_changed.empty(); }
};

/// Identity key used for deduplication and diffing: PyPI names are
/// normalised (lowercase, runs of -_. collapsed to -), others compared as is.
std::string package_key(Ecosystem ecosystem, std::string_view name);
std::string normalize_pypi_name(std::string_view name);

SnapshotDiff diff_snapshots(const SnapshotCapture& before, const SnapshotCapture& after);

inline constexpr std::string_view kHashUnavailableProperty = "x-sacrospec-hash-unavailable";
inline constexpr std::string_view kUnverifiableProperty = "x-sacrospec-unverifiable";
inline constexpr std::string_view kUnresolvedVersion = "unresolved";

/// One library component per dependency. Hashes come from an artifact whose
/// file name identifies the package; otherwise the component is flagged
/// hash-unavailable. Version-absent dependencies get version "unresolved"
/// and an unverifiable marker.
std::vector<ComponentRecord> snapshot_to_components(const SnapshotCapture& snapshot);

Json to_json(const DependencyDecl& dep);
Json to_json(const SnapshotCapture& snapshot);
Json to_json(const SnapshotDiff& diff);

}  // namespace aibom

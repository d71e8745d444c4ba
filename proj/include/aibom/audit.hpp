#pragma once

// Replay auditing: component-level fidelity between an original AIBOM and
// a recomputed one, container and output digest checks, and the embedded
// provenance chain.

#include <cstdint>
#include <string>
#include <vector>

#include "aibom/matcher.hpp"
#include "aibom/model.hpp"
#include "aibom/provenance.hpp"

namespace aibom {

enum class DeviationKind { kDigestMismatch, kMissingInReplay, kExtraInReplay, kUnverifiable };
std::string_view to_string(DeviationKind k);

struct Deviation {
  std::string type;
  ComponentRef component;
  DeviationKind kind;
  std::string detail;
};

struct FidelityReport {
  /// Compared components: verifiable pairs plus unpaired entries on either side.
  std::uint64_t total = 0;
  std::uint64_t matched = 0;
  std::vector<Deviation> deviations;

  /// 100 * matched / total, half-up to one decimal ("98.7"); "100.0" when total is 0.
  std::string fidelity_pct() const;
  /// Exact comparison, independent of rendering.
  bool perfect() const { return matched == total; }
  std::size_t count(DeviationKind kind) const;
};

/// Pairs components by (type, name) in order of occurrence. A pair matches
/// iff both carry the same set of hashes. A component whose version is
/// unresolved, that is flagged unverifiable, or that has no hashes is
/// reported unverifiable and excluded from the total.
FidelityReport replay_compare(const AibomDocument& original, const AibomDocument& recomputed);

/// Compares `observed` ("sha256:<hex>" or bare hex) with the treContainerHash
/// property on the root component, else the first ai-model component that
/// has one. Case-insensitive. Throws DomainError if no component carries it.
bool verify_container(const AibomDocument& doc, std::string_view observed);

/// Recomputes the Merkle root over `files` and compares it with the stored
/// outputDigest (root component first, then ai-model components). When
/// per-file records were bound, names and sizes must also agree, so a
/// renamed file fails. Throws DomainError if no outputDigest is stored.
bool verify_outputs(const AibomDocument& doc, const std::vector<OutputFile>& files);

struct ProvenanceChain {
  std::vector<std::string> source_repositories;
  ArtifactDigest container_build_context;
  ToolDescriptor execution_agent;
  std::string executed_at;
  std::vector<std::string> transformation_lineage;
  friend bool operator==(const ProvenanceChain&, const ProvenanceChain&) = default;
};

inline constexpr std::string_view kProvenanceSourcesProperty = "x-sacrospec-provenance-sourceRepositories";
inline constexpr std::string_view kProvenanceBuildContextProperty = "x-sacrospec-provenance-buildContext";
inline constexpr std::string_view kProvenanceAgentProperty = "x-sacrospec-provenance-executionAgent";
inline constexpr std::string_view kProvenanceLineageProperty = "x-sacrospec-provenance-lineage";

/// Builds the chain from the document (non-advisory external references,
/// first tool, metadata timestamp) plus the caller's build context and
/// lineage, and embeds it as root-component properties so a later
/// signature covers it.
ProvenanceChain assemble_chain(AibomDocument& doc, const ArtifactDigest& build_context,
                               std::vector<std::string> lineage);
/// Reads an embedded chain back. Throws StructuralError if absent or malformed.
ProvenanceChain extract_chain(const AibomDocument& doc);

Json to_json(const FidelityReport& report);
Json to_json(const ProvenanceChain& chain);

}  // namespace aibom

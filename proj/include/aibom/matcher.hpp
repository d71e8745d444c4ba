#pragma once

// Matching of vulnerability records against AIBOM components, severity
// classification of the matches, and mitigation proposals.

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "aibom/cvss.hpp"
#include "aibom/identifiers.hpp"
#include "aibom/model.hpp"
#include "aibom/vulnerability.hpp"

namespace aibom {

struct ComponentRef {
  std::string name;
  std::string version;
  friend auto operator<=>(const ComponentRef&, const ComponentRef&) = default;
};

enum class MatchBasis { kPurl, kCpe, kHashConfirmed };
std::string_view to_string(MatchBasis b);

struct MatchResult {
  ComponentRef component;
  CveRecord cve;
  MatchBasis basis = MatchBasis::kPurl;
  Severity severity = Severity::kUnscored;
};

enum class MitigationKind { kDependencyFreeze, kContainerPatch, kEnvironmentFork };
std::string_view to_string(MitigationKind k);

struct MitigationAction {
  MitigationKind kind;
  ComponentRef target;
  std::string rationale;
};

struct CveMatchReport {
  std::vector<MatchResult> matches;
  std::size_t critical_alerts = 0;
  std::vector<ComponentRef> unverifiable;
  /// Components that were resolved and checked (matched or clean).
  std::vector<ComponentRef> assessed;
  std::vector<MitigationAction> mitigations;
};

/// Matches every component under doc.components (the root component
/// describes the job itself and is not inventoried). A digest listed in
/// `known` fixes the component's identity regardless of its declared
/// name/version; otherwise the PURL supplies it. Components with neither
/// are reported unverifiable.
CveMatchReport match_components(const AibomDocument& doc, const std::vector<CveRecord>& records,
                                const KnownArtifactIndex* known = nullptr,
                                const CpeAliasTable& aliases = CpeAliasTable::bundled());

/// Identifiers to query for the components match_components would assess,
/// deduplicated, in first-seen order.
struct QueryPlan {
  std::vector<Purl> purls;
  std::vector<CpeId> cpes;
};
QueryPlan plan_queries(const AibomDocument& doc, const KnownArtifactIndex* known = nullptr,
                       const CpeAliasTable& aliases = CpeAliasTable::bundled());

/// Ground-truth label for one (component, advisory) pair.
struct TruthLabel {
  ComponentRef component;
  std::string cve_id;
  bool vulnerable = false;
};

/// Exact rational; value 1 when the denominator is zero.
struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 0;
  double value() const { return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Ratio& a, const Ratio& b) {
    const auto an = a.den == 0 ? 1 : a.num, ad = a.den == 0 ? 1 : a.den;
    const auto bn = b.den == 0 ? 1 : b.num, bd = b.den == 0 ? 1 : b.den;
    return an * bd == bn * ad;
  }
};

struct MatchMetrics {
  std::uint64_t true_positives = 0;
  std::uint64_t false_positives = 0;
  std::uint64_t false_negatives = 0;
  Ratio precision;
  Ratio recall;
  Ratio f1;
};

/// Predicted pairs absent from `truth` count as false positives.
/// Throws DomainError when `truth` is empty.
MatchMetrics evaluate_matching(const CveMatchReport& report, const std::vector<TruthLabel>& truth);

Json to_json(const ComponentRef& ref);
Json to_json(const CveMatchReport& report);
Json to_json(const MatchMetrics& metrics);

}  // namespace aibom

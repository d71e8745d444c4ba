#include "aibom/matcher.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <tuple>

#include "aibom/inspector.hpp"

namespace aibom {
namespace {

struct Identity {
  std::string ecosystem;
  std::string name;
  std::string version;
  bool hash_confirmed = false;
};

bool usable_version(std::string_view v) { return !v.empty() && v != kUnresolvedVersion; }

std::optional<Identity> resolve(const ComponentRecord& c, const KnownArtifactIndex* known) {
  if (known) {
    if (const HashEntry* h = c.sha256_hash()) {
      if (auto d = Sha256Digest::from_hex(h->content)) {
        if (auto it = known->find(*d); it != known->end())
          return Identity{it->second.ecosystem, it->second.name, it->second.version, true};
      }
    }
  }
  if (const std::string* flag = c.property(kUnverifiableProperty); flag && *flag == "true") return std::nullopt;
  if (!c.purl) return std::nullopt;
  auto purl = Purl::parse(*c.purl);
  if (!purl) return std::nullopt;
  const std::string version = purl->version.empty() ? c.version : purl->version;
  if (!usable_version(version) || !usable_version(c.version)) return std::nullopt;
  const std::string eco = purl_type_ecosystem(purl->type);
  return Identity{eco, normalize_package_name(eco, purl->name), version, false};
}

std::optional<CpeId> cpe_for(const Identity& id, const CpeAliasTable& aliases) {
  auto eco = parse_ecosystem(id.ecosystem);
  if (!eco) return std::nullopt;
  return to_cpe(DependencyDecl{*eco, id.name, id.version, {}}, aliases);
}

// The first affected constraint that covers the identity decides the basis.
std::optional<MatchBasis> match_basis(const Identity& id, const std::optional<CpeId>& cpe,
                                      const CveRecord& record) {
  for (const auto& a : record.affected) {
    if (a.ecosystem == "cpe") {
      if (cpe && to_lower_ascii(cpe->product_key()) == a.name && a.range.contains(cpe->version))
        return id.hash_confirmed ? MatchBasis::kHashConfirmed : MatchBasis::kCpe;
      continue;
    }
    if (a.ecosystem != id.ecosystem || a.name != id.name) continue;
    // Debian revisions do not follow semantic versioning.
    if (a.range.contains(id.version, id.ecosystem != "deb"))
      return id.hash_confirmed ? MatchBasis::kHashConfirmed : MatchBasis::kPurl;
  }
  return std::nullopt;
}

std::string score_text(const CveRecord& r) {
  if (!r.cvss_score) return "unscored";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", *r.cvss_score);
  return buf;
}

}  // namespace

std::string_view to_string(MatchBasis b) {
  switch (b) {
    case MatchBasis::kPurl: return "purl";
    case MatchBasis::kCpe: return "cpe";
    case MatchBasis::kHashConfirmed: return "hash-confirmed";
  }
  return "purl";
}

std::string_view to_string(MitigationKind k) {
  switch (k) {
    case MitigationKind::kDependencyFreeze: return "dependency-freeze";
    case MitigationKind::kContainerPatch: return "container-patch";
    case MitigationKind::kEnvironmentFork: return "environment-fork";
  }
  return "dependency-freeze";
}

CveMatchReport match_components(const AibomDocument& doc, const std::vector<CveRecord>& records,
                                const KnownArtifactIndex* known, const CpeAliasTable& aliases) {
  CveMatchReport report;
  std::set<std::tuple<MitigationKind, std::string, std::string>> proposed;

  for (const ComponentRecord* c : flatten_components(doc)) {
    const ComponentRef ref{c->name, c->version};
    const auto id = resolve(*c, known);
    if (!id) {
      report.unverifiable.push_back(ref);
      continue;
    }
    report.assessed.push_back(ref);
    const auto cpe = cpe_for(*id, aliases);
    std::set<std::string> matched;
    for (const auto& record : records) {
      if (matched.contains(record.id)) continue;
      const auto basis = match_basis(*id, cpe, record);
      if (!basis) continue;
      matched.insert(record.id);
      const Severity sev = classify_severity(record.cvss_score);
      report.matches.push_back({ref, record, *basis, sev});
      if (sev != Severity::kCritical) continue;
      ++report.critical_alerts;
      const MitigationKind kind =
          c->type == "container" ? MitigationKind::kContainerPatch : MitigationKind::kDependencyFreeze;
      if (proposed.emplace(kind, ref.name, ref.version).second) {
        report.mitigations.push_back(
            {kind, ref,
             std::string(kind == MitigationKind::kContainerPatch ? "patch the container base: "
                                                                 : "freeze at a fixed release: ") +
                 record.id + " (CVSS " + score_text(record) + ")"});
      }
    }
  }

  if (report.critical_alerts >= 3) {
    const ComponentRef root{doc.metadata.component.name, doc.metadata.component.version};
    report.mitigations.push_back({MitigationKind::kEnvironmentFork, root,
                                  "fork the environment: " + std::to_string(report.critical_alerts) +
                                      " critical alerts in one document"});
  }
  return report;
}

QueryPlan plan_queries(const AibomDocument& doc, const KnownArtifactIndex* known,
                       const CpeAliasTable& aliases) {
  QueryPlan plan;
  std::set<std::string> seen_purls, seen_cpes;
  for (const ComponentRecord* c : flatten_components(doc)) {
    const auto id = resolve(*c, known);
    if (!id) continue;
    const auto eco = parse_ecosystem(id->ecosystem);
    const Purl purl = to_purl(DependencyDecl{eco.value_or(Ecosystem::kOther), id->name, id->version, {}});
    if (seen_purls.insert(purl.render()).second) plan.purls.push_back(purl);
    if (auto cpe = cpe_for(*id, aliases); cpe && seen_cpes.insert(cpe->render()).second) plan.cpes.push_back(*cpe);
  }
  return plan;
}

MatchMetrics evaluate_matching(const CveMatchReport& report, const std::vector<TruthLabel>& truth) {
  if (truth.empty()) throw DomainError("evaluate_matching: empty ground truth");
  using Key = std::tuple<std::string, std::string, std::string>;
  std::set<Key> positives;
  for (const auto& t : truth)
    if (t.vulnerable) positives.emplace(t.component.name, t.component.version, t.cve_id);
  std::set<Key> predicted;
  for (const auto& m : report.matches) predicted.emplace(m.component.name, m.component.version, m.cve.id);

  MatchMetrics out;
  for (const auto& p : predicted) (positives.contains(p) ? out.true_positives : out.false_positives)++;
  for (const auto& p : positives)
    if (!predicted.contains(p)) ++out.false_negatives;
  const auto tp = out.true_positives;
  out.precision = {tp, tp + out.false_positives};
  out.recall = {tp, tp + out.false_negatives};
  // Harmonic mean of precision and recall, kept exact: 2TP / (2TP + FP + FN).
  out.f1 = {2 * tp, 2 * tp + out.false_positives + out.false_negatives};
  return out;
}

Json to_json(const ComponentRef& ref) { return {{"name", ref.name}, {"version", ref.version}}; }

Json to_json(const CveMatchReport& report) {
  Json matches = Json::array();
  for (const auto& m : report.matches)
    matches.push_back({{"componentRef", to_json(m.component)},
                       {"cve", to_json(m.cve)},
                       {"basis", to_string(m.basis)},
                       {"severityClass", to_string(m.severity)}});
  Json unverifiable = Json::array();
  for (const auto& u : report.unverifiable) unverifiable.push_back(to_json(u));
  Json mitigations = Json::array();
  for (const auto& a : report.mitigations)
    mitigations.push_back({{"kind", to_string(a.kind)}, {"target", to_json(a.target)}, {"rationale", a.rationale}});
  return {{"matches", matches},
          {"criticalAlerts", report.critical_alerts},
          {"assessed", report.assessed.size()},
          {"unverifiable", unverifiable},
          {"mitigations", mitigations}};
}

Json to_json(const MatchMetrics& m) {
  auto ratio = [](const Ratio& r) {
    return Json{{"numerator", r.den == 0 ? 1 : r.num}, {"denominator", r.den == 0 ? 1 : r.den}, {"value", r.value()}};
  };
  return {{"truePositives", m.true_positives},
          {"falsePositives", m.false_positives},
          {"falseNegatives", m.false_negatives},
          {"precision", ratio(m.precision)},
          {"recall", ratio(m.recall)},
          {"f1", ratio(m.f1)}};
}

}  // namespace aibom

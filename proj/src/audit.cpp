#include "aibom/audit.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "aibom/inspector.hpp"

namespace aibom {
namespace {

bool unverifiable(const ComponentRecord& c) {
  if (c.version.empty() || c.version == kUnresolvedVersion) return true;
  if (const std::string* flag = c.property(kUnverifiableProperty); flag && *flag == "true") return true;
  return c.hashes.empty();
}

std::vector<std::pair<std::string, std::string>> hash_set(const ComponentRecord& c) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& h : c.hashes) out.emplace_back(h.alg, to_lower_ascii(h.content));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string describe(const std::vector<std::pair<std::string, std::string>>& hashes) {
  std::string s;
  for (const auto& [alg, content] : hashes) s += (s.empty() ? "" : ", ") + alg + ":" + content;
  return s.empty() ? "none" : s;
}

// Property by prefixed or bare SACRO name.
const std::string* sacro_property(const ComponentRecord& c, std::string_view field) {
  if (const std::string* v = c.property(std::string(kExtensionPrefix) + std::string(field))) return v;
  return c.property(field);
}

// Root first, then ai-model components in document order.
std::vector<const ComponentRecord*> carriers(const AibomDocument& doc) {
  std::vector<const ComponentRecord*> out{&doc.metadata.component};
  for (const ComponentRecord* c : flatten_components(doc))
    if (c->type == "ai-model") out.push_back(c);
  return out;
}

std::string strip_digest(std::string_view s) {
  std::string v = to_lower_ascii(s);
  if (v.starts_with(Sha256Digest::kPrefix)) v.erase(0, Sha256Digest::kPrefix.size());
  return v;
}

Json parse_property_json(const ComponentRecord& root, std::string_view name) {
  const std::string* v = root.property(name);
  if (!v) throw StructuralError("/metadata/component/properties", "provenance property " + std::string(name) + " absent");
  Json j = Json::parse(*v, nullptr, false);
  if (j.is_discarded()) throw StructuralError("/metadata/component/properties", std::string(name) + " is not JSON");
  return j;
}

}  // namespace

std::string_view to_string(DeviationKind k) {
  switch (k) {
    case DeviationKind::kDigestMismatch: return "digest-mismatch";
    case DeviationKind::kMissingInReplay: return "missing-in-replay";
    case DeviationKind::kExtraInReplay: return "extra-in-replay";
    case DeviationKind::kUnverifiable: return "unverifiable";
  }
  return "unverifiable";
}

std::string FidelityReport::fidelity_pct() const {
  if (total == 0) return "100.0";
  // Tenths of a percent, rounded half-up: floor((2000 m + t) / 2t).
  const std::uint64_t tenths = (2000 * matched + total) / (2 * total);
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

std::size_t FidelityReport::count(DeviationKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(deviations.begin(), deviations.end(), [&](const Deviation& d) { return d.kind == kind; }));
}

FidelityReport replay_compare(const AibomDocument& original, const AibomDocument& recomputed) {
  using Key = std::pair<std::string, std::string>;
  std::map<Key, std::vector<const ComponentRecord*>> replay;
  for (const ComponentRecord* c : flatten_components(recomputed)) replay[{c->type, c->name}].push_back(c);
  std::map<Key, std::size_t> consumed;

  FidelityReport report;
  auto flag = [&](const ComponentRecord& c, DeviationKind kind, std::string detail) {
    report.deviations.push_back({c.type, {c.name, c.version}, kind, std::move(detail)});
  };

  for (const ComponentRecord* orig : flatten_components(original)) {
    const Key key{orig->type, orig->name};
    auto it = replay.find(key);
    std::size_t& used = consumed[key];
    const ComponentRecord* twin = (it != replay.end() && used < it->second.size()) ? it->second[used++] : nullptr;

    if (unverifiable(*orig) || (twin && unverifiable(*twin))) {
      flag(*orig, DeviationKind::kUnverifiable,
           twin ? "no comparable digest on one side" : "no comparable digest; absent from replay");
      continue;
    }
    ++report.total;
    if (!twin) {
      flag(*orig, DeviationKind::kMissingInReplay, "no " + orig->type + " named '" + orig->name + "' in replay");
      continue;
    }
    const auto a = hash_set(*orig);
    const auto b = hash_set(*twin);
    if (a == b) {
      ++report.matched;
      continue;
    }
    std::string detail = "original " + describe(a) + "; replay " + describe(b);
    if (orig->version != twin->version) detail = "version " + orig->version + " -> " + twin->version + "; " + detail;
    flag(*orig, DeviationKind::kDigestMismatch, std::move(detail));
  }

  for (const ComponentRecord* c : flatten_components(recomputed)) {
    const Key key{c->type, c->name};
    std::size_t& used = consumed[key];
    const auto& list = replay[key];
    // Entries beyond those consumed by pairing are extras, in document order.
    const auto pos = static_cast<std::size_t>(std::find(list.begin(), list.end(), c) - list.begin());
    if (pos < used) continue;
    if (unverifiable(*c)) {
      flag(*c, DeviationKind::kUnverifiable, "no comparable digest; absent from original");
      continue;
    }
    ++report.total;
    flag(*c, DeviationKind::kExtraInReplay, "no " + c->type + " named '" + c->name + "' in original");
  }
  return report;
}

bool verify_container(const AibomDocument& doc, std::string_view observed) {
  for (const ComponentRecord* c : carriers(doc))
    if (const std::string* stored = sacro_property(*c, "treContainerHash"))
      return strip_digest(*stored) == strip_digest(observed);
  throw DomainError("no component carries treContainerHash");
}

bool verify_outputs(const AibomDocument& doc, const std::vector<OutputFile>& files) {
  const ComponentRecord* carrier = nullptr;
  const std::string* stored = nullptr;
  for (const ComponentRecord* c : carriers(doc)) {
    if ((stored = sacro_property(*c, "outputDigest"))) {
      carrier = c;
      break;
    }
  }
  if (!stored) throw DomainError("no component carries outputDigest");
  if (files.empty()) return false;

  const auto digests = digest_output_set(files);
  if (strip_digest(*stored) != build_merkle(digests).root().hex()) return false;

  std::vector<std::tuple<std::string, std::uint64_t, std::string>> recorded;
  for (const auto& p : *carrier->properties) {
    if (p.name != kOutputArtifactProperty) continue;
    auto rec = parse_output_record(p.value);
    if (!rec) return false;
    recorded.emplace_back(rec->source_name, rec->byte_size, rec->digest.hex());
  }
  if (recorded.empty()) return true;
  std::vector<std::tuple<std::string, std::uint64_t, std::string>> actual;
  for (const auto& d : digests) actual.emplace_back(d.source_name, d.byte_size, d.digest.hex());
  std::sort(recorded.begin(), recorded.end());
  std::sort(actual.begin(), actual.end());
  return recorded == actual;
}

ProvenanceChain assemble_chain(AibomDocument& doc, const ArtifactDigest& build_context,
                               std::vector<std::string> lineage) {
  ProvenanceChain chain;
  if (doc.external_references) {
    for (const auto& ref : *doc.external_references)
      if (ref.type != "vulnerability" && ref.type != "advisories") chain.source_repositories.push_back(ref.url);
  }
  chain.container_build_context = build_context;
  if (!doc.metadata.tools.empty()) chain.execution_agent = doc.metadata.tools.front();
  chain.execution_agent.extra = Json::object();
  chain.executed_at = doc.metadata.timestamp;
  chain.transformation_lineage = std::move(lineage);

  ComponentRecord& root = doc.metadata.component;
  root.set_property(kProvenanceSourcesProperty, Json(chain.source_repositories).dump());
  root.set_property(kProvenanceBuildContextProperty, output_record(chain.container_build_context));
  root.set_property(kProvenanceAgentProperty, Json{{"vendor", chain.execution_agent.vendor},
                                                   {"name", chain.execution_agent.name},
                                                   {"version", chain.execution_agent.version},
                                                   {"timestamp", chain.executed_at}}
                                                  .dump());
  root.set_property(kProvenanceLineageProperty, Json(chain.transformation_lineage).dump());
  return chain;
}

ProvenanceChain extract_chain(const AibomDocument& doc) {
  const ComponentRecord& root = doc.metadata.component;
  ProvenanceChain chain;
  try {
    chain.source_repositories = parse_property_json(root, kProvenanceSourcesProperty).get<std::vector<std::string>>();
    const Json agent = parse_property_json(root, kProvenanceAgentProperty);
    chain.execution_agent.vendor = agent.at("vendor").get<std::string>();
    chain.execution_agent.name = agent.at("name").get<std::string>();
    chain.execution_agent.version = agent.at("version").get<std::string>();
    chain.executed_at = agent.at("timestamp").get<std::string>();
    chain.transformation_lineage = parse_property_json(root, kProvenanceLineageProperty).get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    throw StructuralError("/metadata/component/properties", std::string("malformed provenance chain: ") + e.what());
  }
  const std::string* ctx = root.property(kProvenanceBuildContextProperty);
  auto parsed = ctx ? parse_output_record(*ctx) : std::nullopt;
  if (!parsed) throw StructuralError("/metadata/component/properties", "malformed or absent provenance build context");
  chain.container_build_context = *parsed;
  return chain;
}

Json to_json(const FidelityReport& r) {
  Json devs = Json::array();
  for (const auto& d : r.deviations)
    devs.push_back({{"componentRef", {{"type", d.type}, {"name", d.component.name}, {"version", d.component.version}}},
                    {"kind", to_string(d.kind)},
                    {"detail", d.detail}});
  return {{"total", r.total}, {"matched", r.matched}, {"fidelityPct", r.fidelity_pct()}, {"deviations", devs}};
}

Json to_json(const ProvenanceChain& c) {
  return {{"sourceRepositories", c.source_repositories},
          {"containerBuildContext", Json::parse(output_record(c.container_build_context))},
          {"executionAgent",
           {{"vendor", c.execution_agent.vendor}, {"name", c.execution_agent.name}, {"version", c.execution_agent.version}}},
          {"timestamp", c.executed_at},
          {"transformationLineage", c.transformation_lineage}};
}

}  // namespace aibom

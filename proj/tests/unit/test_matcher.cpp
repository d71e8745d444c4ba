#include <doctest.h>

#include <random>

#include "aibom/crypto.hpp"
#include "aibom/errors.hpp"
#include "aibom/matcher.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace aibom;
using testing_support::fixture_path;

namespace {

ComponentRecord lib(std::string name, std::string version, std::optional<std::string> purl,
                    std::string type = "library") {
  ComponentRecord c;
  c.type = std::move(type);
  c.name = std::move(name);
  c.version = std::move(version);
  c.purl = std::move(purl);
  c.hashes.push_back({"SHA-256", sha256(c.name + c.version).hex()});
  return c;
}

AibomDocument doc_with(std::vector<ComponentRecord> comps) {
  AibomDocument d = parse_document(testing_support::read_fixture("template.json"));
  d.signature.reset();
  d.components = std::move(comps);
  return d;
}

CveRecord record(std::string id, std::optional<double> score, std::string eco, std::string name,
                 std::string range) {
  CveRecord r;
  r.id = std::move(id);
  r.cvss_score = score;
  r.source = "osv";
  r.affected.push_back({std::move(eco), std::move(name), VersionConstraint::parse(range)});
  return r;
}

std::size_t critical_in(const CveMatchReport& r) {
  return static_cast<std::size_t>(std::count_if(r.matches.begin(), r.matches.end(), [](const MatchResult& m) {
    return m.severity == Severity::kCritical;
  }));
}

// Every component lands in exactly one of assessed / unverifiable.
void check_partition(const AibomDocument& doc, const CveMatchReport& r) {
  std::multiset<ComponentRef> all, seen;
  for (const auto* c : flatten_components(doc)) all.insert({c->name, c->version});
  for (const auto& a : r.assessed) seen.insert(a);
  for (const auto& u : r.unverifiable) seen.insert(u);
  CHECK(all == seen);
  for (const auto& m : r.matches)
    CHECK(std::find(r.assessed.begin(), r.assessed.end(), m.component) != r.assessed.end());
}

}  // namespace

TEST_CASE("range boundaries decide matches") {
  const auto rec = record("R-1", 5.5, "pypi", "numpy", ">=1.22.0 <1.22.2");
  const auto doc = doc_with({lib("numpy", "1.22.0", "pkg:pypi/numpy@1.22.0"),
                             lib("numpy", "1.22.2", "pkg:pypi/numpy@1.22.2")});
  const auto r = match_components(doc, {rec});
  REQUIRE(r.matches.size() == 1);
  CHECK(r.matches[0].component == ComponentRef{"numpy", "1.22.0"});
  CHECK(r.matches[0].basis == MatchBasis::kPurl);
  CHECK(r.matches[0].severity == Severity::kMedium);
  CHECK(r.assessed.size() == 2);
  CHECK(r.critical_alerts == 0);
  CHECK(r.mitigations.empty());
}

TEST_CASE("unresolved and purl-less components are unverifiable, never dropped") {
  const auto rec = record("R-1", 9.8, "pypi", "requests", "<3.0.0");
  ComponentRecord flagged = lib("requests", "2.0.0", "pkg:pypi/requests@2.0.0");
  flagged.properties.emplace();
  flagged.set_property(kUnverifiableProperty, "true");
  const auto doc = doc_with({lib("requests", "unresolved", std::nullopt),
                             lib("requests", "2.0.0", std::nullopt),
                             lib("requests", "2.0.0", "not a purl"),
                             lib("requests", "", "pkg:pypi/requests@2.0.0"),
                             flagged});
  const auto r = match_components(doc, {rec});
  CHECK(r.matches.empty());
  CHECK(r.unverifiable.size() == 5);
  CHECK(r.assessed.empty());
  check_partition(doc, r);
}

TEST_CASE("name normalisation and ecosystem must both agree") {
  const auto rec = record("R-1", 4.0, "pypi", "scikit-learn", "==1.3.2");
  const auto doc = doc_with({lib("Scikit_Learn", "1.3.2", "pkg:pypi/Scikit_Learn@1.3.2"),
                             lib("scikit-learn", "1.3.2", "pkg:conda/scikit-learn@1.3.2")});
  const auto r = match_components(doc, {rec});
  REQUIRE(r.matches.size() == 1);
  CHECK(r.matches[0].component.name == "Scikit_Learn");
}

TEST_CASE("deb versions compare by exact string") {
  const auto exact = record("D-1", 7.5, "deb", "openldap", "==2.5.13+dfsg-5");
  const auto ranged = record("D-2", 7.5, "deb", "openldap", "<3.0.0");
  const auto doc = doc_with({lib("openldap", "2.5.13+dfsg-5", "pkg:deb/debian/openldap@2.5.13+dfsg-5")});
  const auto r = match_components(doc, {exact, ranged});
  REQUIRE(r.matches.size() == 1);
  CHECK(r.matches[0].cve.id == "D-1");
}

TEST_CASE("CPE-keyed NVD constraints match through the alias table") {
  OfflineFixtureSource src(fixture_path("cve"));
  const auto nvd = query_nvd({*CpeId::parse("cpe:2.3:a:numpy:numpy:1.22.0:*:*:*:*:*:*:*")}, src);
  const auto doc = doc_with({lib("numpy", "1.22.0", "pkg:pypi/numpy@1.22.0"),
                             lib("numpy", "1.22.2", "pkg:pypi/numpy@1.22.2")});
  const auto r = match_components(doc, nvd);
  REQUIRE(r.matches.size() == 1);
  CHECK(r.matches[0].basis == MatchBasis::kCpe);
  CHECK(r.matches[0].severity == Severity::kHigh);

  CpeAliasTable empty;
  CHECK(match_components(doc, nvd, nullptr, empty).matches.empty());
}

TEST_CASE("a second view of the same advisory can still match") {
  CveRecord osv_view = record("CVE-9", 9.1, "pypi", "other-package", "<1.0.0");
  CveRecord pypi_view = record("CVE-9", 9.1, "pypi", "numpy", "<2.0.0");
  const auto doc = doc_with({lib("numpy", "1.0.0", "pkg:pypi/numpy@1.0.0")});
  const auto r = match_components(doc, {osv_view, pypi_view, pypi_view});
  CHECK(r.matches.size() == 1);
}

TEST_CASE("known-artifact digests override declared identity") {
  OfflineFixtureSource src(fixture_path("cve"));
  const auto wheel = hash_file(fixture_path("torch-1.4.0-wheel.bin"));
  // Declares an unaffected version and has no purl, but the digest says torch 1.4.0.
  ComponentRecord disguised = lib("torch", "2.5.0", std::nullopt);
  disguised.hashes = {{"SHA-256", wheel.digest.hex()}};
  const auto doc = doc_with({disguised});

  const auto plan = plan_queries(doc, src.known_artifacts());
  REQUIRE(plan.purls.size() == 1);
  CHECK(plan.purls[0].render() == "pkg:pypi/torch@1.4.0");
  const auto records = query_osv(plan.purls, src);

  const auto r = match_components(doc, records, src.known_artifacts());
  REQUIRE(r.matches.size() == 1);
  CHECK(r.matches[0].basis == MatchBasis::kHashConfirmed);
  CHECK(r.matches[0].cve.id == "CVE-2022-45907");
  CHECK(r.matches[0].component == ComponentRef{"torch", "2.5.0"});

  // Without the index the component cannot be resolved.
  const auto blind = match_components(doc, records);
  CHECK(blind.matches.empty());
  CHECK(blind.unverifiable.size() == 1);

  // A purl that contradicts the digest also loses to the digest.
  ComponentRecord contradicted = disguised;
  contradicted.purl = "pkg:pypi/torch@2.5.0";
  const auto r2 = match_components(doc_with({contradicted}), records, src.known_artifacts());
  REQUIRE(r2.matches.size() == 1);
  CHECK(r2.matches[0].basis == MatchBasis::kHashConfirmed);
}

TEST_CASE("mitigations follow the severity rules") {
  const std::vector<CveRecord> records = {record("C-1", 9.8, "pypi", "a", "<9.0.0"),
                                          record("C-2", 9.5, "pypi", "a", "<9.0.0"),
                                          record("C-3", 9.1, "generic", "base", "*"),
                                          record("H-1", 8.9, "pypi", "b", "<9.0.0")};
  ComponentRecord base = lib("base", "22.04", "pkg:generic/base@22.04", "container");
  auto doc = doc_with({lib("a", "1.0.0", "pkg:pypi/a@1.0.0"), lib("b", "1.0.0", "pkg:pypi/b@1.0.0"), base});
  // "generic" purls map to ecosystem "other".
  doc.components[2].purl = "pkg:generic/base@22.04";
  auto recs = records;
  recs[2].affected[0].ecosystem = "other";
  recs[2].affected[0].range = VersionConstraint::parse("==22.04");

  const auto r = match_components(doc, recs);
  CHECK(r.matches.size() == 4);
  CHECK(r.critical_alerts == 3);
  CHECK(r.critical_alerts == critical_in(r));
  REQUIRE(r.mitigations.size() == 3);
  CHECK(r.mitigations[0].kind == MitigationKind::kDependencyFreeze);
  CHECK(r.mitigations[0].target == ComponentRef{"a", "1.0.0"});
  CHECK(r.mitigations[1].kind == MitigationKind::kContainerPatch);
  CHECK(r.mitigations[1].target == ComponentRef{"base", "22.04"});
  CHECK(r.mitigations[2].kind == MitigationKind::kEnvironmentFork);
  CHECK(r.mitigations[2].target == ComponentRef{doc.metadata.component.name, doc.metadata.component.version});

  // Two criticals: no fork.
  recs.pop_back();
  recs.erase(recs.begin());
  const auto r2 = match_components(doc, recs);
  CHECK(r2.critical_alerts == 2);
  for (const auto& m : r2.mitigations) CHECK(m.kind != MitigationKind::kEnvironmentFork);
}

TEST_CASE("the labelled corpus reproduces its confusion matrix") {
  const auto corpus = testing_support::load_cve_oracle_corpus();
  const auto r = match_components(corpus.doc, corpus.records);
  check_partition(corpus.doc, r);
  CHECK(r.critical_alerts == corpus.expected["criticalAlerts"].get<std::size_t>());
  REQUIRE(r.unverifiable.size() == 1);
  CHECK(r.unverifiable[0] == ComponentRef{"pkg-b", "unresolved"});

  const auto m = evaluate_matching(r, corpus.truth);
  CHECK(m.true_positives == 13);
  CHECK(m.false_positives == 1);
  CHECK(m.false_negatives == 2);
  CHECK(m.precision == Ratio{13, 14});
  CHECK(m.recall == Ratio{13, 15});
  CHECK(m.f1 == Ratio{26, 29});
}

TEST_CASE("match decisions equal the lattice oracle") {
  const auto corpus = testing_support::load_cve_oracle_corpus();
  const auto r = match_components(corpus.doc, corpus.records);
  std::set<std::pair<std::string, std::string>> got;
  for (const auto& m : r.matches) got.insert({m.component.version, m.cve.id});
  std::set<std::pair<std::string, std::string>> want;
  for (const auto& rec : corpus.raw["records"]) {
    if (rec["package"] != "pkg-a") continue;
    oracle::LatticeRange range;
    const auto& iv = rec["interval"];
    if (!iv["lower"].is_null()) range.lower = iv["lower"].get<std::string>();
    range.lower_inclusive = iv["lowerInclusive"];
    if (!iv["upper"].is_null()) range.upper = iv["upper"].get<std::string>();
    range.upper_inclusive = iv["upperInclusive"];
    for (const auto& v : corpus.lattice)
      if (oracle::lattice_contains(corpus.lattice, range, v)) want.insert({v, rec["id"]});
  }
  CHECK(got == want);
}

TEST_CASE("evaluate_matching arithmetic") {
  CveMatchReport rep;
  auto add = [&](std::string name, std::string cve) {
    CveRecord c;
    c.id = std::move(cve);
    rep.matches.push_back({{std::move(name), "1"}, c, MatchBasis::kPurl, Severity::kLow});
  };
  add("a", "X1");
  add("b", "X2");
  add("c", "X3");
  add("d", "X4");  // false positive
  const std::vector<TruthLabel> truth = {{{"a", "1"}, "X1", true}, {{"b", "1"}, "X2", true},
                                         {{"c", "1"}, "X3", true}, {{"d", "1"}, "X4", false},
                                         {{"e", "1"}, "X5", true}};
  const auto m = evaluate_matching(rep, truth);
  CHECK(m.true_positives == 3);
  CHECK(m.false_positives == 1);
  CHECK(m.false_negatives == 1);
  CHECK(m.precision.value() == 0.75);
  CHECK(m.recall.value() == 0.75);
  CHECK(m.f1.value() == 0.75);

  CveMatchReport perfect;
  for (const auto& t : truth)
    if (t.vulnerable) {
      CveRecord c;
      c.id = t.cve_id;
      perfect.matches.push_back({t.component, c, MatchBasis::kPurl, Severity::kLow});
    }
  const auto p = evaluate_matching(perfect, truth);
  CHECK(p.precision.value() == 1.0);
  CHECK(p.recall.value() == 1.0);
  CHECK(p.f1.value() == 1.0);

  CHECK(evaluate_matching(CveMatchReport{}, {{{"a", "1"}, "X", false}}).precision.value() == 1.0);
  CHECK_THROWS_AS(evaluate_matching(rep, {}), DomainError);
  const Json j = to_json(m);
  CHECK(j["precision"]["numerator"] == 3);
  CHECK(j["precision"]["denominator"] == 4);
}

TEST_CASE("offline matching is byte-identical across runs") {
  const auto corpus = testing_support::load_cve_oracle_corpus();
  const std::string a = to_json(match_components(corpus.doc, corpus.records)).dump();
  const std::string b = to_json(match_components(corpus.doc, corpus.records)).dump();
  CHECK(a == b);
}

TEST_CASE("critical counts stay consistent on random inputs") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ComponentRecord> comps;
    std::vector<CveRecord> recs;
    for (int i = 0; i < 20; ++i) {
      const std::string name = "p" + std::to_string(rng() % 6);
      const std::string ver = std::to_string(rng() % 3) + "." + std::to_string(rng() % 3) + ".0";
      comps.push_back(rng() % 7 == 0 ? lib(name, "unresolved", std::nullopt)
                                     : lib(name, ver, "pkg:pypi/" + name + "@" + ver));
    }
    for (int i = 0; i < 10; ++i) {
      std::optional<double> score;
      if (rng() % 5) score = static_cast<double>(rng() % 101) / 10.0;
      recs.push_back(record("R-" + std::to_string(i), score, "pypi", "p" + std::to_string(rng() % 6),
                            "<" + std::to_string(rng() % 3) + ".1.0"));
    }
    const auto doc = doc_with(comps);
    const auto r = match_components(doc, recs);
    CHECK(r.critical_alerts == critical_in(r));
    for (const auto& m : r.matches) CHECK(m.severity == classify_severity(m.cve.cvss_score));
    check_partition(doc, r);
  }
}

TEST_CASE("query plans dedupe identifiers") {
  const auto doc = doc_with({lib("numpy", "1.22.0", "pkg:pypi/numpy@1.22.0"),
                             lib("NumPy", "1.22.0", "pkg:pypi/NumPy@1.22.0"),
                             lib("mystery", "1.0.0", "pkg:pypi/mystery@1.0.0"),
                             lib("x", "unresolved", std::nullopt)});
  const auto plan = plan_queries(doc);
  REQUIRE(plan.purls.size() == 2);
  CHECK(plan.purls[0].render() == "pkg:pypi/numpy@1.22.0");
  REQUIRE(plan.cpes.size() == 1);
  CHECK(plan.cpes[0].render() == "cpe:2.3:a:numpy:numpy:1.22.0:*:*:*:*:*:*:*");
}

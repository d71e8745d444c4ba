#include <doctest.h>

#include <deque>
#include <mutex>

#include "aibom/errors.hpp"
#include "aibom/vulnerability.hpp"
#include "fixtures.hpp"

using namespace aibom;
using testing_support::fixture_path;

namespace {

Purl purl(const std::string& text) { return *Purl::parse(text); }

// Records every request and replies from a routing function.
class FakeTransport : public HttpTransport {
 public:
  struct Request {
    std::string method, url, body;
    std::map<std::string, std::string> headers;
  };
  std::function<HttpResponse(const Request&)> route;
  std::vector<Request> log;
  std::mutex mu;

  HttpResponse get(const std::string& url, const std::map<std::string, std::string>& headers) override {
    return handle({"GET", url, "", headers});
  }
  HttpResponse post(const std::string& url, const std::string& body,
                    const std::map<std::string, std::string>& headers) override {
    return handle({"POST", url, body, headers});
  }

 private:
  HttpResponse handle(Request r) {
    {
      std::lock_guard lock(mu);
      log.push_back(r);
    }
    return route(r);
  }
};

// Counts fetch calls and batch sizes; returns one record per purl.
class CountingSource : public VulnerabilitySource {
 public:
  std::vector<std::size_t> batch_sizes;
  std::size_t fail_on_batch = SIZE_MAX;

  std::vector<CveRecord> fetch_osv(const std::vector<Purl>& batch) override {
    if (batch_sizes.size() == fail_on_batch) {
      batch_sizes.push_back(batch.size());
      throw SourceUnavailableError("down", {record("PARTIAL-1")});
    }
    batch_sizes.push_back(batch.size());
    std::vector<CveRecord> out;
    for (const auto& p : batch) out.push_back(record("ID-" + p.name));
    out.push_back(record("SHARED"));
    return out;
  }
  std::vector<CveRecord> fetch_nvd(const CpeId& cpe) override {
    if (cpe.product == "down") throw SourceUnavailableError("down", {});
    return {record("NVD-" + cpe.product, "nvd")};
  }
  std::optional<CveRecord> lookup(std::string_view) override { return std::nullopt; }

  static CveRecord record(std::string id, std::string source = "osv") {
    CveRecord r;
    r.id = std::move(id);
    r.source = std::move(source);
    return r;
  }
};

RetryPolicy instant_retry(std::vector<std::chrono::milliseconds>* sleeps, std::mutex* mu) {
  RetryPolicy p;
  p.max_attempts = 4;
  p.initial_delay = std::chrono::milliseconds(100);
  p.multiplier = 2.0;
  p.sleep = [sleeps, mu](std::chrono::milliseconds d) {
    std::lock_guard lock(*mu);
    sleeps->push_back(d);
  };
  return p;
}

Json osv_vuln_json(const std::string& id, const std::string& pkg) {
  return {{"id", id},
          {"summary", "s " + id},
          {"affected",
           {{{"package", {{"ecosystem", "PyPI"}, {"name", pkg}}},
             {"ranges", {{{"type", "ECOSYSTEM"}, {"events", {{{"introduced", "0"}}, {{"fixed", "9.9.9"}}}}}}}}}}};
}

}  // namespace

TEST_CASE("OSV normalisation of the torch fixture") {
  OfflineFixtureSource src(fixture_path("cve"));
  const auto got = query_osv({purl("pkg:pypi/torch@1.4.0")}, src);
  REQUIRE(got.size() == 1);
  CveRecord want;
  want.id = "CVE-2022-45907";
  want.summary = "PyTorch torch.jit.annotations.parse_type_line uses eval unsafely, allowing arbitrary code execution";
  want.cvss_score = 9.8;
  want.source = "osv";
  VersionConstraint range;
  range.add_interval({std::nullopt, true, "1.13.1", false});
  want.affected.push_back({"pypi", "torch", range});
  CHECK(got[0] == want);
}

TEST_CASE("OSV normalisation of explicit version lists and events") {
  OfflineFixtureSource src(fixture_path("cve"));
  const auto got = query_osv({purl("pkg:deb/debian/openldap@2.5.13+dfsg-5")}, src);
  REQUIRE(got.size() == 1);
  CHECK(got[0].id == "CVE-2023-2953");
  CHECK(got[0].cvss_score == 7.5);
  REQUIRE(got[0].affected.size() == 1);
  CHECK(got[0].affected[0].ecosystem == "deb");
  CHECK(got[0].affected[0].range.exact() == std::vector<std::string>{"2.5.13+dfsg-5"});

  const Json v = {{"id", "X-1"},
                  {"details", "first line\nsecond line"},
                  {"affected",
                   {{{"package", {{"ecosystem", "PyPI"}, {"name", "Foo_Bar"}}},
                     {"ranges",
                      {{{"type", "SEMVER"},
                        {"events", {{{"introduced", "1.0.0"}}, {{"last_affected", "1.2.0"}},
                                    {{"introduced", "2.0.0"}}}}}}}}}}};
  const CveRecord r = normalize_osv(v);
  CHECK(r.summary == "first line");
  CHECK_FALSE(r.cvss_score.has_value());
  REQUIRE(r.affected.size() == 1);
  CHECK(r.affected[0].name == "foo-bar");
  const auto& c = r.affected[0].range;
  CHECK(c.contains("1.2.0"));
  CHECK_FALSE(c.contains("1.3.0"));
  CHECK(c.contains("7.0.0"));
  CHECK_THROWS_AS(normalize_osv(Json{{"summary", "no id"}}), StructuralError);
}

TEST_CASE("empty queries return empty lists") {
  OfflineFixtureSource src(fixture_path("cve"));
  CHECK(query_osv({}, src).empty());
  CHECK(query_nvd({}, src).empty());
  CHECK(query_osv({purl("pkg:pypi/unknown@1.0.0")}, src).empty());
}

TEST_CASE("the template's advisory reference resolves through the fixtures") {
  const AibomDocument doc = parse_document(testing_support::read_fixture("template.json"));
  REQUIRE(doc.external_references.has_value());
  const auto id = advisory_id_from_url(doc.external_references->at(0).url);
  REQUIRE(id.has_value());
  CHECK(*id == "CVE-2023-2953");
  OfflineFixtureSource src(fixture_path("cve"));
  const auto r = src.lookup(*id);
  REQUIRE(r.has_value());
  CHECK(r->id == "CVE-2023-2953");
  CHECK(src.lookup("TEST-NVD-0001").has_value());
  CHECK_FALSE(src.lookup("CVE-0000-0000").has_value());
  CHECK(advisory_id_from_url("https://nvd.nist.gov/vuln/detail/CVE-2022-45907/?x=1") == "CVE-2022-45907");
  CHECK_FALSE(advisory_id_from_url("not a url").has_value());
  CHECK_FALSE(advisory_id_from_url("https://osv.dev/").has_value());
}

TEST_CASE("NVD records take the highest CVSS version") {
  OfflineFixtureSource src(fixture_path("cve"));
  const auto got = query_nvd({*CpeId::parse("cpe:2.3:a:numpy:numpy:1.22.0:*:*:*:*:*:*:*")}, src);
  REQUIRE(got.size() == 1);
  CHECK(got[0].id == "TEST-NVD-0001");
  CHECK(got[0].source == "nvd");
  CHECK(got[0].cvss_score == 7.8);
  REQUIRE(got[0].affected.size() == 1);
  CHECK(got[0].affected[0].ecosystem == "cpe");
  CHECK(got[0].affected[0].name == "numpy:numpy");
  CHECK(got[0].affected[0].range.intervals()[0] == VersionInterval{"1.22.0", true, "1.22.2", false});

  const Json only_v2 = {{"cve",
                         {{"id", "CVE-1"},
                          {"metrics", {{"cvssMetricV2", {{{"type", "Secondary"}, {"cvssData", {{"baseScore", 4.3}}}},
                                                         {{"type", "Primary"}, {"cvssData", {{"baseScore", 5.0}}}}}}}},
                          {"configurations",
                           {{{"nodes",
                              {{{"cpeMatch",
                                 {{{"vulnerable", true}, {"criteria", "cpe:2.3:a:Acme:Wid\\:get:1.0:*:*:*:*:*:*:*"}},
                                  {{"vulnerable", false}, {"criteria", "cpe:2.3:o:x:y:*:*:*:*:*:*:*:*"}},
                                  {{"vulnerable", true}, {"criteria", "cpe:2.3:a:acme:gadget:-:*:*:*:*:*:*:*"}}}}}}}}}}}}};
  const CveRecord r = normalize_nvd(only_v2);
  CHECK(r.cvss_score == 5.0);
  REQUIRE(r.affected.size() == 1);
  CHECK(r.affected[0].name == "acme:wid:get");
  CHECK(r.affected[0].range.exact() == std::vector<std::string>{"1.0"});
}

TEST_CASE("record JSON round trip") {
  OfflineFixtureSource src(fixture_path("cve"));
  for (const char* id : {"CVE-2022-45907", "CVE-2023-2953", "TEST-2024-0001", "TEST-NVD-0001"}) {
    const auto r = src.lookup(id);
    REQUIRE(r.has_value());
    CHECK(cve_record_from_json(to_json(*r)) == *r);
  }
}

TEST_CASE("merging OSV and NVD views of one advisory") {
  OfflineFixtureSource src(fixture_path("cve"));
  std::vector<CveRecord> all = query_osv({purl("pkg:pypi/numpy@1.22.0")}, src);
  const auto nvd = query_nvd({*CpeId::parse("cpe:2.3:a:numpy:numpy:1.22.0:*:*:*:*:*:*:*")}, src);
  all.insert(all.end(), nvd.begin(), nvd.end());
  const auto merged = merge_records(all);
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].id == "TEST-2024-0001");
  CHECK(merged[0].aliases == std::vector<std::string>{"TEST-NVD-0001"});
  CHECK(merged[0].cvss_score == 7.8);
  REQUIRE(merged[0].affected.size() == 2);
  CHECK(merged[0].affected[0].ecosystem == "pypi");
  CHECK(merged[0].affected[1].ecosystem == "cpe");

  CveRecord a = CountingSource::record("GHSA-xxxx");
  a.aliases = {"CVE-2024-1"};
  CveRecord b = CountingSource::record("CVE-2024-1", "nvd");
  const auto m2 = merge_records({a, b, CountingSource::record("CVE-0001")});
  REQUIRE(m2.size() == 2);
  CHECK(m2[0].id == "CVE-0001");
  CHECK(m2[1].id == "CVE-2024-1");
  CHECK(m2[1].aliases == std::vector<std::string>{"GHSA-xxxx"});
}

TEST_CASE("query_osv batches at most 1000 purls and dedups") {
  std::vector<Purl> purls;
  for (int i = 0; i < 2500; ++i) purls.push_back(purl("pkg:pypi/p" + std::to_string(i) + "@1.0.0"));
  CountingSource src;
  const auto got = query_osv(purls, src);
  CHECK(src.batch_sizes == std::vector<std::size_t>{1000, 1000, 500});
  CHECK(got.size() == 2501);  // one per purl plus a single SHARED

  CountingSource failing;
  failing.fail_on_batch = 1;
  try {
    query_osv(purls, failing);
    FAIL("expected SourceUnavailableError");
  } catch (const SourceUnavailableError& e) {
    CHECK(e.partial().size() == 1000 + 1 + 1);
  }
}

TEST_CASE("query_nvd carries partial results on failure") {
  CountingSource src;
  const CpeId ok{"a", "v", "ok", "1"};
  const CpeId down{"a", "v", "down", "1"};
  CHECK(query_nvd({ok, ok}, src).size() == 1);
  try {
    query_nvd({ok, down}, src);
    FAIL("expected SourceUnavailableError");
  } catch (const SourceUnavailableError& e) {
    REQUIRE(e.partial().size() == 1);
    CHECK(e.partial()[0].id == "NVD-ok");
  }
}

TEST_CASE("offline fixture directory errors") {
  CHECK_THROWS_AS(OfflineFixtureSource(fixture_path("no-such-dir")), IoError);
  testing_support::TempDir dir;
  dir.write("bad.json", R"({"key": "pkg:pypi/x@1", "source": "ghsa", "vulns": []})");
  CHECK_THROWS_AS(OfflineFixtureSource(dir.path()), StructuralError);
  testing_support::TempDir dir2;
  dir2.write(fixture_file_name("pkg:pypi/x@1.0.0"), R"({"source": "osv", "vulns": [{"id": "K-1"}]})");
  OfflineFixtureSource keyless(dir2.path());
  CHECK(keyless.fetch_osv({purl("pkg:pypi/x@1.0.0")}).size() == 1);
  CHECK(fixture_file_name("pkg:pypi/a@1+b") == "pkg%3Apypi%2Fa%401%2Bb.json");
}

TEST_CASE("known artifacts load from the fixture directory") {
  OfflineFixtureSource src(fixture_path("cve"));
  const auto* idx = src.known_artifacts();
  REQUIRE(idx != nullptr);
  REQUIRE(idx->size() == 1);
  CHECK(idx->begin()->second.name == "torch");
}

TEST_CASE("live OSV source: batch, pagination and detail fetch") {
  FakeTransport t;
  std::vector<std::chrono::milliseconds> sleeps;
  std::mutex mu;
  int batch_calls = 0;
  t.route = [&](const FakeTransport::Request& r) -> HttpResponse {
    if (r.method == "POST") {
      CHECK(r.url == "https://osv.test/v1/querybatch");
      const Json body = Json::parse(r.body);
      Json results = Json::array();
      for (const auto& q : body["queries"]) {
        const std::string p = q["package"]["purl"];
        if (p == "pkg:pypi/a@1.0.0" && !q.contains("page_token"))
          results.push_back({{"vulns", {{{"id", "OSV-A1"}}}}, {"next_page_token", "tok"}});
        else if (p == "pkg:pypi/a@1.0.0")
          results.push_back({{"vulns", {{{"id", "OSV-A2"}}}}});
        else
          results.push_back({{"vulns", {{{"id", "OSV-A1"}}, {{"id", "OSV-B1"}}}}});
      }
      ++batch_calls;
      return {200, Json{{"results", results}}.dump(), ""};
    }
    const std::string id = r.url.substr(r.url.rfind('/') + 1);
    return {200, osv_vuln_json(id, "a").dump(), ""};
  };
  LiveSourceOptions opt;
  opt.osv_base = "https://osv.test";
  opt.retry = instant_retry(&sleeps, &mu);
  opt.max_in_flight = 3;
  LiveSource src(t, opt);
  auto got = src.fetch_osv({purl("pkg:pypi/a@1.0.0"), purl("pkg:pypi/b@2.0.0")});
  CHECK(batch_calls == 2);
  std::set<std::string> ids;
  for (const auto& r : got) ids.insert(r.id);
  CHECK(ids == std::set<std::string>{"OSV-A1", "OSV-A2", "OSV-B1"});
  CHECK(sleeps.empty());
  CHECK_THROWS_AS(src.fetch_osv(std::vector<Purl>(1001, purl("pkg:pypi/a@1.0.0"))), DomainError);
}

TEST_CASE("live source retries transient failures with exponential backoff") {
  FakeTransport t;
  std::vector<std::chrono::milliseconds> sleeps;
  std::mutex mu;
  std::deque<int> statuses = {0, 503, 429, 200};
  t.route = [&](const FakeTransport::Request&) -> HttpResponse {
    const int s = statuses.front();
    statuses.pop_front();
    if (s == 200) return {200, osv_vuln_json("OSV-R", "r").dump(), ""};
    return {s, "", s == 0 ? "connection refused" : ""};
  };
  LiveSourceOptions opt;
  opt.retry = instant_retry(&sleeps, &mu);
  LiveSource src(t, opt);
  const auto r = src.lookup("OSV-R");
  REQUIRE(r.has_value());
  CHECK(r->id == "OSV-R");
  CHECK(sleeps == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(100),
                                                           std::chrono::milliseconds(200),
                                                           std::chrono::milliseconds(400)});
}

TEST_CASE("live source gives up after max attempts and does not retry 4xx") {
  FakeTransport t;
  std::vector<std::chrono::milliseconds> sleeps;
  std::mutex mu;
  t.route = [&](const FakeTransport::Request&) -> HttpResponse { return {500, "", ""}; };
  LiveSourceOptions opt;
  opt.retry = instant_retry(&sleeps, &mu);
  LiveSource src(t, opt);
  CHECK_THROWS_AS(src.lookup("X"), SourceUnavailableError);
  CHECK(t.log.size() == 4);
  CHECK(sleeps.size() == 3);

  FakeTransport t404;
  t404.route = [&](const FakeTransport::Request&) -> HttpResponse { return {404, "", ""}; };
  LiveSource src404(t404, opt);
  CHECK_FALSE(src404.lookup("X").has_value());
  CHECK(t404.log.size() == 1);

  FakeTransport garbage;
  garbage.route = [&](const FakeTransport::Request&) -> HttpResponse { return {200, "<html>", ""}; };
  LiveSource srcg(garbage, opt);
  CHECK_THROWS_AS(srcg.lookup("X"), SourceUnavailableError);
}

TEST_CASE("live OSV detail failures keep partial results") {
  FakeTransport t;
  std::vector<std::chrono::milliseconds> sleeps;
  std::mutex mu;
  t.route = [&](const FakeTransport::Request& r) -> HttpResponse {
    if (r.method == "POST")
      return {200, R"({"results":[{"vulns":[{"id":"GOOD-1"},{"id":"BAD-1"}]}]})", ""};
    if (r.url.ends_with("BAD-1")) return {503, "", ""};
    return {200, osv_vuln_json("GOOD-1", "a").dump(), ""};
  };
  LiveSourceOptions opt;
  opt.retry = instant_retry(&sleeps, &mu);
  opt.max_in_flight = 1;
  LiveSource src(t, opt);
  try {
    src.fetch_osv({purl("pkg:pypi/a@1.0.0")});
    FAIL("expected SourceUnavailableError");
  } catch (const SourceUnavailableError& e) {
    REQUIRE(e.partial().size() == 1);
    CHECK(e.partial()[0].id == "GOOD-1");
  }
}

TEST_CASE("live NVD source: pagination and API key header") {
  FakeTransport t;
  std::vector<std::chrono::milliseconds> sleeps;
  std::mutex mu;
  const auto item = [](const std::string& id) {
    return Json{{"cve", {{"id", id}, {"metrics", {{"cvssMetricV31", {{{"type", "Primary"}, {"cvssData", {{"baseScore", 9.1}}}}}}}}}}};
  };
  t.route = [&](const FakeTransport::Request& r) -> HttpResponse {
    CHECK(r.url.starts_with("https://nvd.test/rest/json/cves/2.0?virtualMatchString=cpe%3A2.3%3Aa%3Anumpy%3Anumpy%3A1.22.0"));
    if (r.url.ends_with("startIndex=0"))
      return {200, Json{{"totalResults", 3}, {"vulnerabilities", {item("CVE-1"), item("CVE-2")}}}.dump(), ""};
    if (r.url.ends_with("startIndex=2"))
      return {200, Json{{"totalResults", 3}, {"vulnerabilities", {item("CVE-3")}}}.dump(), ""};
    return {400, "", ""};
  };
  LiveSourceOptions opt;
  opt.nvd_base = "https://nvd.test";
  opt.nvd_api_key = "secret-key";
  opt.nvd_page_size = 2;
  opt.retry = instant_retry(&sleeps, &mu);
  LiveSource src(t, opt);
  const auto got = src.fetch_nvd(*CpeId::parse("cpe:2.3:a:numpy:numpy:1.22.0:*:*:*:*:*:*:*"));
  REQUIRE(got.size() == 3);
  CHECK(got[2].id == "CVE-3");
  CHECK(got[0].cvss_score == 9.1);
  REQUIRE(t.log.size() == 2);
  for (const auto& r : t.log) {
    CHECK(r.headers.at("apiKey") == "secret-key");
    CHECK(r.url.find("secret-key") == std::string::npos);
  }
}

TEST_CASE("live NVD rate limiting ends in source-unavailable with partial pages") {
  FakeTransport t;
  std::vector<std::chrono::milliseconds> sleeps;
  std::mutex mu;
  t.route = [&](const FakeTransport::Request& r) -> HttpResponse {
    if (r.url.ends_with("startIndex=0"))
      return {200, Json{{"totalResults", 2}, {"vulnerabilities", {{{"cve", {{"id", "CVE-1"}}}}}}}.dump(), ""};
    return {403, "", ""};
  };
  LiveSourceOptions opt;
  opt.nvd_page_size = 1;
  opt.retry = instant_retry(&sleeps, &mu);
  LiveSource src(t, opt);
  try {
    src.fetch_nvd(CpeId{"a", "v", "p", "1"});
    FAIL("expected SourceUnavailableError");
  } catch (const SourceUnavailableError& e) {
    REQUIRE(e.partial().size() == 1);
    CHECK(e.partial()[0].id == "CVE-1");
  }
  CHECK(sleeps.size() == 3);
  CHECK(t.log[0].headers.count("apiKey") == 0);
}

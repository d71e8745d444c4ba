#include "aibom/vulnerability.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <mutex>
#include <set>
#include <thread>

#include "aibom/cvss.hpp"
#include "aibom/io.hpp"

namespace aibom {
namespace {

std::string string_or(const Json& obj, std::string_view key, std::string fallback = {}) {
  auto it = obj.find(key);
  return it != obj.end() && it->is_string() ? it->get<std::string>() : fallback;
}

const Json& array_or_empty(const Json& obj, std::string_view key) {
  static const Json kEmpty = Json::array();
  if (!obj.is_object()) return kEmpty;
  auto it = obj.find(key);
  return it != obj.end() && it->is_array() ? *it : kEmpty;
}

VersionConstraint osv_ranges(const Json& affected) {
  VersionConstraint c;
  for (const auto& range : array_or_empty(affected, "ranges")) {
    const std::string type = string_or(range, "type");
    if (type != "SEMVER" && type != "ECOSYSTEM") continue;
    std::optional<std::string> start;
    bool open = false;
    for (const auto& ev : array_or_empty(range, "events")) {
      if (ev.contains("introduced")) {
        const std::string v = string_or(ev, "introduced");
        start = v == "0" ? std::nullopt : std::optional<std::string>(v);
        open = true;
      } else if (ev.contains("fixed") && open) {
        c.add_interval({start, true, string_or(ev, "fixed"), false});
        open = false;
      } else if (ev.contains("last_affected") && open) {
        c.add_interval({start, true, string_or(ev, "last_affected"), true});
        open = false;
      } else if (ev.contains("limit") && open) {
        c.add_interval({start, true, string_or(ev, "limit"), false});
        open = false;
      }
    }
    if (open) c.add_interval({start, true, std::nullopt, false});
  }
  for (const auto& v : array_or_empty(affected, "versions"))
    if (v.is_string()) c.add_exact(v.get<std::string>());
  return c;
}

std::optional<double> osv_score(const Json& severities) {
  std::optional<double> best;
  for (const auto& s : severities) {
    const std::string type = string_or(s, "type");
    if (type != "CVSS_V3" && type != "CVSS_V2" && type != "CVSS_V4") continue;
    const auto score = parse_cvss_score(string_or(s, "score"));
    // Prefer the v3 rendering; fall back to whatever else parses.
    if (score && (type == "CVSS_V3" || !best)) best = score;
  }
  return best;
}

std::string encode_key(std::string_view key) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (char c : key) {
    const auto b = static_cast<unsigned char>(c);
    if (std::isalnum(b) || c == '.' || c == '_' || c == '-') {
      out += c;
    } else {
      out += '%';
      out += kHex[b >> 4];
      out += kHex[b & 0x0f];
    }
  }
  return out;
}

std::string decode_key(std::string_view name) {
  std::string out;
  for (std::size_t i = 0; i < name.size(); ++i) {
    if (name[i] == '%' && i + 2 < name.size()) {
      if (auto b = from_hex(name.substr(i + 1, 2))) {
        out += static_cast<char>((*b)[0]);
        i += 2;
        continue;
      }
    }
    out += name[i];
  }
  return out;
}

std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (char c : s) {
    const auto b = static_cast<unsigned char>(c);
    if (std::isalnum(b) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += c;
    } else {
      out += '%';
      out += kHex[b >> 4];
      out += kHex[b & 0x0f];
    }
  }
  return out;
}

void dedupe_by_id(std::vector<CveRecord>& records) {
  std::set<std::string> seen;
  std::erase_if(records, [&](const CveRecord& r) { return !seen.insert(r.source + "\n" + r.id).second; });
}

bool transient(const HttpResponse& r) {
  return r.status == 0 || r.status == 429 || r.status == 403 || r.status >= 500;
}

// Runs fn(i) for i in [0, n) on at most `width` threads.
template <typename Fn>
void bounded_parallel(std::size_t n, std::size_t width, Fn fn) {
  width = std::max<std::size_t>(1, std::min(width, n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> threads;
  for (std::size_t t = 1; t < width; ++t) threads.emplace_back(worker);
  worker();
  threads.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string osv_ecosystem_token(std::string_view eco) {
  if (eco == "PyPI") return "pypi";
  if (eco.starts_with("Debian") || eco.starts_with("Ubuntu")) return "deb";
  if (eco == "conda" || eco == "Conda") return "conda";
  return to_lower_ascii(eco);
}

std::string normalize_package_name(std::string_view ecosystem, std::string_view name) {
  if (ecosystem == "pypi") return normalize_pypi_name(name);
  if (ecosystem == "cpe") return to_lower_ascii(name);
  return std::string(name);
}

CveRecord normalize_osv(const Json& vuln) {
  if (!vuln.is_object() || !vuln.contains("id") || !vuln["id"].is_string())
    throw StructuralError("/id", "OSV vulnerability without an id");
  CveRecord r;
  r.id = vuln["id"].get<std::string>();
  for (const auto& a : array_or_empty(vuln, "aliases"))
    if (a.is_string()) r.aliases.push_back(a.get<std::string>());
  r.summary = string_or(vuln, "summary");
  if (r.summary.empty()) {
    const std::string details = string_or(vuln, "details");
    r.summary = details.substr(0, details.find('\n'));
  }
  r.cvss_score = osv_score(array_or_empty(vuln, "severity"));
  for (const auto& a : array_or_empty(vuln, "affected")) {
    const Json pkg = a.value("package", Json::object());
    const std::string eco = osv_ecosystem_token(string_or(pkg, "ecosystem"));
    const std::string name = string_or(pkg, "name");
    if (name.empty()) continue;
    if (!r.cvss_score) r.cvss_score = osv_score(array_or_empty(a, "severity"));
    r.affected.push_back({eco, normalize_package_name(eco, name), osv_ranges(a)});
  }
  r.source = "osv";
  return r;
}

CveRecord normalize_nvd(const Json& item) {
  const Json& cve = item.contains("cve") ? item["cve"] : item;
  if (!cve.is_object() || !cve.contains("id") || !cve["id"].is_string())
    throw StructuralError("/cve/id", "NVD item without an id");
  CveRecord r;
  r.id = cve["id"].get<std::string>();
  for (const auto& d : array_or_empty(cve, "descriptions")) {
    if (string_or(d, "lang") == "en") {
      r.summary = string_or(d, "value");
      break;
    }
  }

  // Highest CVSS version present wins; within a version the Primary entry.
  const Json metrics = cve.value("metrics", Json::object());
  for (auto key : {"cvssMetricV40", "cvssMetricV31", "cvssMetricV30", "cvssMetricV2"}) {
    const Json& list = array_or_empty(metrics, key);
    if (list.empty()) continue;
    const Json* chosen = &list[0];
    for (const auto& m : list)
      if (string_or(m, "type") == "Primary") {
        chosen = &m;
        break;
      }
    const Json data = chosen->value("cvssData", Json::object());
    if (auto it = data.find("baseScore"); it != data.end() && it->is_number()) {
      const double s = it->get<double>();
      if (s >= 0.0 && s <= 10.0) r.cvss_score = s;
    }
    if (r.cvss_score) break;
  }

  for (const auto& config : array_or_empty(cve, "configurations")) {
    for (const auto& node : array_or_empty(config, "nodes")) {
      for (const auto& match : array_or_empty(node, "cpeMatch")) {
        if (!match.value("vulnerable", false)) continue;
        // Criteria with a wildcard version are parsed by field, since
        // CpeId::parse requires a concrete version.
        const std::string criteria = string_or(match, "criteria");
        std::vector<std::string> f(1);
        for (std::size_t i = 0; i < criteria.size(); ++i) {
          if (criteria[i] == '\\' && i + 1 < criteria.size()) f.back() += criteria[++i];
          else if (criteria[i] == ':') f.emplace_back();
          else f.back() += criteria[i];
        }
        if (f.size() < 6 || f[0] != "cpe") continue;
        AffectedConstraint ac{"cpe", to_lower_ascii(f[3] + ":" + f[4]), {}};
        const std::string& version = f[5];
        if (version == "*") {
          VersionInterval iv;
          if (match.contains("versionStartIncluding")) iv.lower = string_or(match, "versionStartIncluding");
          else if (match.contains("versionStartExcluding")) {
            iv.lower = string_or(match, "versionStartExcluding");
            iv.lower_inclusive = false;
          }
          if (match.contains("versionEndExcluding")) iv.upper = string_or(match, "versionEndExcluding");
          else if (match.contains("versionEndIncluding")) {
            iv.upper = string_or(match, "versionEndIncluding");
            iv.upper_inclusive = true;
          }
          ac.range.add_interval(std::move(iv));
        } else if (version != "-") {
          ac.range.add_exact(version);
        } else {
          continue;
        }
        r.affected.push_back(std::move(ac));
      }
    }
  }
  r.source = "nvd";
  return r;
}

Json to_json(const CveRecord& r) {
  Json affected = Json::array();
  for (const auto& a : r.affected)
    affected.push_back({{"ecosystem", a.ecosystem}, {"name", a.name}, {"range", a.range.render()}});
  Json j = {{"id", r.id},           {"aliases", r.aliases}, {"summary", r.summary},
            {"affected", affected}, {"source", r.source}};
  j["cvssScore"] = r.cvss_score ? Json(*r.cvss_score) : Json(nullptr);
  return j;
}

CveRecord cve_record_from_json(const Json& j) {
  CveRecord r;
  r.id = j.at("id").get<std::string>();
  r.aliases = j.value("aliases", std::vector<std::string>{});
  r.summary = j.value("summary", "");
  if (j.contains("cvssScore") && j["cvssScore"].is_number()) r.cvss_score = j["cvssScore"].get<double>();
  for (const auto& a : j.value("affected", Json::array()))
    r.affected.push_back({a.at("ecosystem").get<std::string>(), a.at("name").get<std::string>(),
                          VersionConstraint::parse(a.at("range").get<std::string>())});
  r.source = j.value("source", "");
  return r;
}

std::vector<CveRecord> merge_records(std::vector<CveRecord> records) {
  std::vector<CveRecord> out;
  auto names = [](const CveRecord& r) {
    std::set<std::string> s(r.aliases.begin(), r.aliases.end());
    s.insert(r.id);
    return s;
  };
  for (auto& r : records) {
    const auto rn = names(r);
    auto it = std::find_if(out.begin(), out.end(), [&](const CveRecord& o) {
      const auto on = names(o);
      return std::any_of(rn.begin(), rn.end(), [&](const std::string& n) { return on.contains(n); });
    });
    if (it == out.end()) {
      out.push_back(std::move(r));
      continue;
    }
    CveRecord& kept = *it;
    const CveRecord* osv = kept.source == "osv" ? &kept : (r.source == "osv" ? &r : nullptr);
    const CveRecord* nvd = kept.source == "nvd" ? &kept : (r.source == "nvd" ? &r : nullptr);

    CveRecord merged;
    // Prefer a CVE identifier as the canonical id.
    merged.id = kept.id.starts_with("CVE-") || !r.id.starts_with("CVE-") ? kept.id : r.id;
    std::set<std::string> aliases;
    for (const auto& n : names(kept)) aliases.insert(n);
    for (const auto& n : rn) aliases.insert(n);
    aliases.erase(merged.id);
    merged.aliases.assign(aliases.begin(), aliases.end());
    merged.summary = kept.summary.empty() ? r.summary : kept.summary;

    if (kept.cvss_score && r.cvss_score) {
      merged.cvss_score = nvd ? nvd->cvss_score : kept.cvss_score;
      merged.source = nvd ? "nvd" : kept.source;
    } else if (r.cvss_score) {
      merged.cvss_score = r.cvss_score;
      merged.source = r.source;
    } else {
      merged.cvss_score = kept.cvss_score;
      merged.source = kept.source;
    }

    // Ranges: the OSV entry wins for any package both describe.
    const CveRecord& primary = osv ? *osv : kept;
    const CveRecord& secondary = &primary == &kept ? r : kept;
    merged.affected = primary.affected;
    for (const auto& a : secondary.affected) {
      const bool covered = std::any_of(merged.affected.begin(), merged.affected.end(), [&](const auto& m) {
        return m.ecosystem == a.ecosystem && m.name == a.name;
      });
      if (!covered) merged.affected.push_back(a);
    }
    kept = std::move(merged);
  }
  std::sort(out.begin(), out.end(), [](const CveRecord& a, const CveRecord& b) { return a.id < b.id; });
  return out;
}

std::vector<CveRecord> query_osv(const std::vector<Purl>& purls, VulnerabilitySource& client) {
  std::vector<CveRecord> out;
  for (std::size_t start = 0; start < purls.size(); start += kOsvBatchLimit) {
    const auto end = std::min(purls.size(), start + kOsvBatchLimit);
    std::vector<Purl> batch(purls.begin() + static_cast<std::ptrdiff_t>(start),
                            purls.begin() + static_cast<std::ptrdiff_t>(end));
    try {
      auto got = client.fetch_osv(batch);
      out.insert(out.end(), std::make_move_iterator(got.begin()), std::make_move_iterator(got.end()));
    } catch (const SourceUnavailableError& e) {
      out.insert(out.end(), e.partial().begin(), e.partial().end());
      dedupe_by_id(out);
      throw SourceUnavailableError(e.what(), std::move(out));
    }
  }
  dedupe_by_id(out);
  return out;
}

std::vector<CveRecord> query_nvd(const std::vector<CpeId>& cpes, VulnerabilitySource& client) {
  std::vector<CveRecord> out;
  for (const auto& cpe : cpes) {
    try {
      auto got = client.fetch_nvd(cpe);
      out.insert(out.end(), std::make_move_iterator(got.begin()), std::make_move_iterator(got.end()));
    } catch (const SourceUnavailableError& e) {
      out.insert(out.end(), e.partial().begin(), e.partial().end());
      dedupe_by_id(out);
      throw SourceUnavailableError(e.what(), std::move(out));
    }
  }
  dedupe_by_id(out);
  return out;
}

std::string fixture_file_name(std::string_view key) { return encode_key(key) + ".json"; }

OfflineFixtureSource::OfflineFixtureSource(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    throw IoError(dir.string() + ": offline fixture directory not found");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  for (const auto& file : files) {
    const std::string fname = file.filename().string();
    Json j;
    try {
      j = Json::parse(read_file(file));
    } catch (const Json::parse_error& e) {
      throw ParseError(fname + ": " + e.what(), e.byte == 0 ? 0 : e.byte - 1);
    }
    if (fname == "known-artifacts.json") {
      for (const auto& a : array_or_empty(j, "artifacts")) {
        auto d = Sha256Digest::from_hex(string_or(a, "sha256"));
        if (!d) throw StructuralError(fname, "known artifact without a valid sha256");
        const std::string eco = string_or(a, "ecosystem");
        artifacts_[*d] = KnownArtifact{eco, normalize_package_name(eco, string_or(a, "name")),
                                       string_or(a, "version")};
      }
      continue;
    }
    if (!j.is_object()) throw StructuralError(fname, "fixture must be an object");
    const std::string key = string_or(j, "key", decode_key(file.stem().string()));
    const std::string source = string_or(j, "source");
    std::vector<CveRecord> records;
    if (source == "osv") {
      for (const auto& v : array_or_empty(j, "vulns")) records.push_back(normalize_osv(v));
    } else if (source == "nvd") {
      for (const auto& v : array_or_empty(j, "vulnerabilities")) records.push_back(normalize_nvd(v));
    } else {
      throw StructuralError(fname, "fixture source must be \"osv\" or \"nvd\"");
    }
    for (const auto& r : records) by_id_.try_emplace(r.id, r);
    auto& slot = by_key_[key];
    slot.insert(slot.end(), records.begin(), records.end());
  }
}

std::vector<CveRecord> OfflineFixtureSource::fetch_osv(const std::vector<Purl>& batch) {
  std::vector<CveRecord> out;
  for (const auto& p : batch) {
    auto it = by_key_.find(p.render());
    if (it == by_key_.end()) continue;
    for (const auto& r : it->second)
      if (r.source == "osv") out.push_back(r);
  }
  return out;
}

std::vector<CveRecord> OfflineFixtureSource::fetch_nvd(const CpeId& cpe) {
  std::vector<CveRecord> out;
  auto it = by_key_.find(cpe.render());
  if (it == by_key_.end()) return out;
  for (const auto& r : it->second)
    if (r.source == "nvd") out.push_back(r);
  return out;
}

std::optional<CveRecord> OfflineFixtureSource::lookup(std::string_view id) {
  if (auto it = by_id_.find(id); it != by_id_.end()) return it->second;
  for (const auto& [_, r] : by_id_)
    if (std::find(r.aliases.begin(), r.aliases.end(), id) != r.aliases.end()) return r;
  return std::nullopt;
}

LiveSource::LiveSource(HttpTransport& transport, LiveSourceOptions options)
    : transport_(transport), options_(std::move(options)) {
  if (!options_.retry.sleep)
    options_.retry.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

HttpResponse LiveSource::with_retry(const std::function<HttpResponse()>& request,
                                    const std::string& what) {
  auto delay = options_.retry.initial_delay;
  HttpResponse last;
  for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
    last = request();
    if (!transient(last)) return last;
    if (attempt < options_.retry.max_attempts) {
      options_.retry.sleep(delay);
      delay = std::chrono::milliseconds(
          static_cast<long long>(static_cast<double>(delay.count()) * options_.retry.multiplier));
    }
  }
  throw SourceUnavailableError(
      what + ": unavailable after " + std::to_string(options_.retry.max_attempts) +
          " attempts (last status " + std::to_string(last.status) +
          (last.error.empty() ? "" : ", " + last.error) + ")",
      {});
}

std::optional<CveRecord> LiveSource::osv_vuln(const std::string& id) {
  const std::string url = options_.osv_base + "/v1/vulns/" + url_encode(id);
  const auto resp = with_retry([&] { return transport_.get(url, {}); }, "OSV " + id);
  if (resp.status == 404) return std::nullopt;
  if (resp.status != 200) throw SourceUnavailableError("OSV " + id + ": HTTP " + std::to_string(resp.status), {});
  const Json j = Json::parse(resp.body, nullptr, false);
  if (!j.is_object()) throw SourceUnavailableError("OSV " + id + ": malformed response body", {});
  return normalize_osv(j);
}

std::vector<CveRecord> LiveSource::fetch_osv(const std::vector<Purl>& batch) {
  if (batch.size() > kOsvBatchLimit) throw DomainError("OSV batch exceeds 1000 queries");
  std::set<std::string> ids;
  struct Pending {
    std::string purl;
    std::string page_token;
  };
  std::vector<Pending> pending;
  for (const auto& p : batch) pending.push_back({p.render(), {}});

  while (!pending.empty()) {
    Json queries = Json::array();
    for (const auto& p : pending) {
      Json q = {{"package", {{"purl", p.purl}}}};
      if (!p.page_token.empty()) q["page_token"] = p.page_token;
      queries.push_back(std::move(q));
    }
    const std::string body = Json{{"queries", queries}}.dump();
    const auto resp = with_retry(
        [&] { return transport_.post(options_.osv_base + "/v1/querybatch", body,
                                     {{"Content-Type", "application/json"}}); },
        "OSV querybatch");
    if (resp.status != 200)
      throw SourceUnavailableError("OSV querybatch: HTTP " + std::to_string(resp.status), {});
    const Json j = Json::parse(resp.body, nullptr, false);
    if (!j.is_object()) throw SourceUnavailableError("OSV querybatch: malformed response body", {});
    const Json& results = array_or_empty(j, "results");
    if (results.size() != pending.size())
      throw SourceUnavailableError("OSV querybatch: result count mismatch", {});

    std::vector<Pending> next;
    for (std::size_t i = 0; i < results.size(); ++i) {
      for (const auto& v : array_or_empty(results[i], "vulns"))
        if (v.contains("id") && v["id"].is_string()) ids.insert(v["id"].get<std::string>());
      const std::string token = string_or(results[i], "next_page_token");
      if (!token.empty()) next.push_back({pending[i].purl, token});
    }
    pending = std::move(next);
  }

  // Batch results carry ids only; details are fetched per advisory.
  const std::vector<std::string> id_list(ids.begin(), ids.end());
  std::vector<std::optional<CveRecord>> fetched(id_list.size());
  try {
    bounded_parallel(id_list.size(), options_.max_in_flight,
                     [&](std::size_t i) { fetched[i] = osv_vuln(id_list[i]); });
  } catch (const SourceUnavailableError& e) {
    std::vector<CveRecord> partial;
    for (auto& f : fetched)
      if (f) partial.push_back(std::move(*f));
    throw SourceUnavailableError(e.what(), std::move(partial));
  }
  std::vector<CveRecord> out;
  for (auto& f : fetched)
    if (f) out.push_back(std::move(*f));
  return out;
}

std::vector<CveRecord> LiveSource::fetch_nvd(const CpeId& cpe) {
  std::map<std::string, std::string> headers;
  if (options_.nvd_api_key) headers["apiKey"] = *options_.nvd_api_key;
  // virtualMatchString accepts version-specific names that are not in the CPE dictionary.
  const std::string match = "cpe:2.3:" + cpe.part + ":" + cpe.vendor + ":" + cpe.product + ":" + cpe.version;
  std::vector<CveRecord> out;
  std::size_t start = 0;
  while (true) {
    const std::string url = options_.nvd_base + "/rest/json/cves/2.0?virtualMatchString=" +
                            url_encode(match) + "&resultsPerPage=" +
                            std::to_string(options_.nvd_page_size) + "&startIndex=" + std::to_string(start);
    HttpResponse resp;
    try {
      resp = with_retry([&] { return transport_.get(url, headers); }, "NVD " + cpe.render());
    } catch (const SourceUnavailableError& e) {
      throw SourceUnavailableError(e.what(), std::move(out));
    }
    if (resp.status == 404) return out;
    if (resp.status != 200)
      throw SourceUnavailableError("NVD " + cpe.render() + ": HTTP " + std::to_string(resp.status), std::move(out));
    const Json j = Json::parse(resp.body, nullptr, false);
    if (!j.is_object())
      throw SourceUnavailableError("NVD " + cpe.render() + ": malformed response body", std::move(out));
    const Json& items = array_or_empty(j, "vulnerabilities");
    for (const auto& item : items) out.push_back(normalize_nvd(item));
    const auto total_it = j.find("totalResults");
    const std::size_t total =
        total_it != j.end() && total_it->is_number_unsigned() ? total_it->get<std::size_t>() : 0;
    start += items.size();
    if (items.empty() || start >= total) break;
  }
  return out;
}

std::optional<CveRecord> LiveSource::lookup(std::string_view id) { return osv_vuln(std::string(id)); }

std::optional<std::string> advisory_id_from_url(std::string_view url) {
  if (!is_absolute_url(url)) return std::nullopt;
  if (auto q = url.find_first_of("?#"); q != std::string_view::npos) url = url.substr(0, q);
  while (!url.empty() && url.back() == '/') url.remove_suffix(1);
  const auto slash = url.rfind('/');
  const auto id = url.substr(slash + 1);
  if (id.empty() || url.substr(0, slash).ends_with(":/")) return std::nullopt;
  return std::string(id);
}

}  // namespace aibom

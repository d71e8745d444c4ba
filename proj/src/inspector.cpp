#include "aibom/inspector.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_map>

#include "aibom/errors.hpp"
#include "aibom/identifiers.hpp"

namespace aibom {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

std::string located(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line);
}

// Parses one PEP 508-ish requirement. Returns nullopt when the text does
// not start with a valid distribution name.
std::optional<DependencyDecl> parse_requirement(std::string_view req, std::string source) {
  static const std::regex kReq(R"(^([A-Za-z0-9](?:[A-Za-z0-9._-]*[A-Za-z0-9])?)\s*(\[[^\]]*\])?\s*(.*)$)");
  std::string line(trim(req));
  if (auto semi = line.find(';'); semi != std::string::npos) line = std::string(trim(line.substr(0, semi)));
  // Per-requirement options such as --hash=sha256:... are not part of the specifier.
  if (auto opt = line.find(" --"); opt != std::string::npos) line = std::string(trim(line.substr(0, opt)));

  std::smatch m;
  if (!std::regex_match(line, m, kReq)) return std::nullopt;
  DependencyDecl d{Ecosystem::kPypi, m[1].str(), std::nullopt, std::move(source)};
  const std::string spec(trim(m[3].str()));
  if (spec.empty()) {
    d.source += " [unpinned]";
  } else if (spec.starts_with("@")) {
    d.source += " [url " + std::string(trim(std::string_view(spec).substr(1))) + "]";
  } else if (spec.starts_with("===") || spec.starts_with("==")) {
    const std::string v(trim(std::string_view(spec).substr(spec.starts_with("===") ? 3 : 2)));
    if (!v.empty() && v.find_first_of("*,<>!=~ ") == std::string::npos) d.version = v;
    else d.source += " [unpinned " + spec + "]";
  } else if (spec.find_first_of("<>!~=") == 0) {
    d.source += " [unpinned " + spec + "]";
  } else {
    return std::nullopt;
  }
  return d;
}

DependencyDecl unparsed(std::string_view raw, std::string source) {
  return DependencyDecl{Ecosystem::kOther, std::string(raw), std::nullopt,
                        std::move(source) + " [unparsed]"};
}

// "numpy=1.26.4=py311_0", "conda-forge::scipy", "python>=3.9", "openssl 3.0.2"
DependencyDecl parse_conda_spec(std::string_view spec, std::string source) {
  spec = trim(spec);
  if (auto chan = spec.find("::"); chan != std::string_view::npos) spec = spec.substr(chan + 2);
  DependencyDecl d{Ecosystem::kConda, {}, std::nullopt, std::move(source)};

  std::string_view rest;
  if (auto sp = spec.find_first_of(" \t"); sp != std::string_view::npos) {
    d.name = std::string(spec.substr(0, sp));
    rest = trim(spec.substr(sp));
    auto end = rest.find_first_of(" \t");
    const std::string v(rest.substr(0, end));
    if (v.find_first_of("*<>!=~,|") == std::string::npos) d.version = v;
    else d.source += " [unpinned " + std::string(rest) + "]";
    return d;
  }
  const auto op = spec.find_first_of("=<>!~");
  d.name = std::string(spec.substr(0, op));
  if (d.name.empty()) return unparsed(spec, d.source);
  if (op == std::string_view::npos) {
    d.source += " [unpinned]";
    return d;
  }
  rest = spec.substr(op);
  std::string_view v;
  if (rest.starts_with("==")) v = rest.substr(2);
  else if (rest.starts_with("=") ) v = rest.substr(1);
  if (!v.empty()) v = v.substr(0, v.find('='));  // drop the build string
  if (!v.empty() && v.find_first_of("*<>!~,|") == std::string_view::npos) {
    d.version = std::string(v);
  } else {
    d.source += " [unpinned " + std::string(rest) + "]";
  }
  return d;
}

bool artifact_matches(const ArtifactDigest& a, const DependencyDecl& d) {
  auto norm = [](std::string_view s) {
    std::string out = to_lower_ascii(s);
    std::replace(out.begin(), out.end(), '_', '-');
    return out;
  };
  const std::string file = norm(a.source_name);
  const std::string name = norm(d.name);
  if (file == name) return true;
  if (!d.version) return false;
  const std::string stem = name + "-" + norm(*d.version);
  if (!file.starts_with(stem)) return false;
  return file.size() == stem.size() || file[stem.size()] == '.' || file[stem.size()] == '-';
}

}  // namespace

std::string_view to_string(Ecosystem e) {
  switch (e) {
    case Ecosystem::kPypi: return "pypi";
    case Ecosystem::kConda: return "conda";
    case Ecosystem::kDeb: return "deb";
    case Ecosystem::kOther: return "other";
  }
  return "other";
}

std::optional<Ecosystem> parse_ecosystem(std::string_view token) {
  if (token == "pypi") return Ecosystem::kPypi;
  if (token == "conda") return Ecosystem::kConda;
  if (token == "deb") return Ecosystem::kDeb;
  if (token == "other") return Ecosystem::kOther;
  return std::nullopt;
}

std::string normalize_pypi_name(std::string_view name) {
  std::string out;
  bool sep = false;
  for (char c : name) {
    if (c == '-' || c == '_' || c == '.') {
      sep = true;
      continue;
    }
    if (sep && !out.empty()) out += '-';
    sep = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string package_key(Ecosystem ecosystem, std::string_view name) {
  return std::string(to_string(ecosystem)) + "/" +
         (ecosystem == Ecosystem::kPypi ? normalize_pypi_name(name) : std::string(name));
}

std::vector<DependencyDecl> parse_pip_manifest(std::string_view text, std::string_view source) {
  std::vector<DependencyDecl> out;
  const auto lines = split_lines(text);
  std::string logical;
  std::size_t logical_start = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view raw = lines[i];
    if (logical.empty()) logical_start = i + 1;
    if (!raw.empty() && raw.back() == '\\') {
      logical.append(raw.substr(0, raw.size() - 1));
      logical += ' ';
      continue;
    }
    logical.append(raw);
    std::string line = std::move(logical);
    logical.clear();

    // A '#' begins a comment at line start or after whitespace.
    for (std::size_t p = line.find('#'); p != std::string::npos; p = line.find('#', p + 1)) {
      if (p == 0 || std::isspace(static_cast<unsigned char>(line[p - 1]))) {
        line.resize(p);
        break;
      }
    }
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const std::string where = located(source, logical_start);

    if (body.starts_with("-e ") || body.starts_with("--editable")) {
      const auto egg = body.find("#egg=");
      if (egg == std::string_view::npos) {
        out.push_back(unparsed(body, where));
      } else {
        std::string name(body.substr(egg + 5));
        name = name.substr(0, name.find_first_of("&[ "));
        out.push_back(DependencyDecl{Ecosystem::kPypi, name, std::nullopt, where + " [editable]"});
      }
      continue;
    }
    if (body.starts_with("-")) continue;  // -r, -c, --index-url and friends

    if (auto dep = parse_requirement(body, where)) out.push_back(std::move(*dep));
    else out.push_back(unparsed(body, where));
  }
  return out;
}

std::vector<DependencyDecl> parse_conda_env(std::string_view text, std::string_view source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ParseError(std::string("invalid YAML: ") + e.what(),
                     e.mark.pos < 0 ? 0 : static_cast<std::size_t>(e.mark.pos));
  }
  std::vector<DependencyDecl> out;
  if (root.IsNull()) return out;
  if (!root.IsMap()) throw ParseError("environment file must be a mapping", 0);
  const YAML::Node deps = root["dependencies"];
  if (!deps || deps.IsNull()) return out;
  if (!deps.IsSequence()) throw ParseError("'dependencies' must be a list", 0);

  for (std::size_t i = 0; i < deps.size(); ++i) {
    const YAML::Node& entry = deps[i];
    const std::string where = located(source, static_cast<std::size_t>(entry.Mark().line) + 1);
    if (entry.IsScalar()) {
      out.push_back(parse_conda_spec(entry.as<std::string>(), where));
    } else if (entry.IsMap() && entry["pip"]) {
      const YAML::Node pip = entry["pip"];
      if (!pip.IsSequence()) throw ParseError("'pip' entry must be a list", 0);
      for (std::size_t k = 0; k < pip.size(); ++k) {
        const std::string pw = located(source, static_cast<std::size_t>(pip[k].Mark().line) + 1);
        if (!pip[k].IsScalar()) throw ParseError("pip requirement must be a string", 0);
        const std::string req = pip[k].as<std::string>();
        if (auto dep = parse_requirement(req, pw)) out.push_back(std::move(*dep));
        else out.push_back(unparsed(req, pw));
      }
    } else {
      throw ParseError("unsupported dependency entry at " + where, 0);
    }
  }
  return out;
}

std::vector<DependencyDecl> parse_dpkg_status(std::string_view text, std::string_view source) {
  std::vector<DependencyDecl> out;
  std::map<std::string, std::string> fields;
  std::string last_key;
  std::size_t stanza_line = 1;

  auto flush = [&] {
    auto pkg = fields.find("Package");
    auto ver = fields.find("Version");
    auto status = fields.find("Status");
    if (pkg != fields.end() && ver != fields.end() && status != fields.end()) {
      std::string s = status->second;
      // Status values are three whitespace-separated words.
      std::istringstream words(s);
      std::string want, flag, state;
      words >> want >> flag >> state;
      if (want == "install" && flag == "ok" && state == "installed" && !pkg->second.empty() &&
          !ver->second.empty())
        out.push_back(DependencyDecl{Ecosystem::kDeb, pkg->second, ver->second,
                                     located(source, stanza_line)});
    }
    fields.clear();
    last_key.clear();
  };

  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (trim(line).empty()) {
      if (!fields.empty()) flush();
      stanza_line = i + 2;
      continue;
    }
    if (line.front() == ' ' || line.front() == '\t') {
      if (!last_key.empty()) fields[last_key] += "\n" + std::string(trim(line));
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    last_key = std::string(trim(line.substr(0, colon)));
    fields[last_key] = std::string(trim(line.substr(colon + 1)));
  }
  if (!fields.empty()) flush();
  return out;
}

ImportLogResult ingest_runtime_import_log(std::string_view text, std::string_view log_id) {
  ImportLogResult result;
  std::set<std::string> seen;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    std::istringstream in{std::string(line)};
    std::string tag, eco, name, version, extra;
    in >> tag >> eco >> name >> version;
    const bool extra_tokens = static_cast<bool>(in >> extra);
    const auto ecosystem = parse_ecosystem(eco);
    if (tag != "IMPORT" || !ecosystem || name.empty() || version.empty() || extra_tokens) {
      ++result.malformed;
      result.malformed_lines.push_back(i + 1);
      continue;
    }
    if (!seen.insert(package_key(*ecosystem, name)).second) continue;
    result.declarations.push_back(
        DependencyDecl{*ecosystem, name, version, located(log_id, i + 1)});
  }
  return result;
}

ModelStateRecord capture_model_state(const std::filesystem::path& model_file,
                                     std::string architecture,
                                     std::optional<std::uint64_t> parameter_count,
                                     std::map<std::string, std::string> hyperparameters) {
  return ModelStateRecord{std::move(architecture), parameter_count, hash_file(model_file),
                          std::move(hyperparameters)};
}

ComponentRecord model_state_to_component(const ModelStateRecord& state, std::string name,
                                         std::string version) {
  ComponentRecord c;
  c.type = "ai-model";
  c.name = std::move(name);
  c.version = std::move(version);
  c.hashes.push_back(HashEntry{std::string(kSha256Alg), state.file_checksum.digest.hex()});
  c.properties.emplace();
  c.set_property("x-sacrospec-modelReference", state.file_checksum.digest.hex());
  c.set_property("x-sacrospec-modelFile", output_record(state.file_checksum));
  if (!state.architecture.empty()) c.set_property("x-sacrospec-modelArchitecture", state.architecture);
  if (state.parameter_count)
    c.set_property("x-sacrospec-parameterCount", std::to_string(*state.parameter_count));
  if (!state.hyperparameters.empty())
    c.set_property("x-sacrospec-hyperparameters", Json(state.hyperparameters).dump());
  return c;
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::kPreLoad: return "pre-load";
    case Stage::kRuntime: return "runtime";
    case Stage::kPostExecution: return "post-execution";
  }
  return "pre-load";
}

Stage parse_stage(std::string_view token) {
  if (token == "pre-load") return Stage::kPreLoad;
  if (token == "runtime") return Stage::kRuntime;
  if (token == "post-execution") return Stage::kPostExecution;
  throw DomainError("unknown capture stage: " + std::string(token));
}

SnapshotCapture capture_snapshot(Stage stage, const std::vector<DependencyDecl>& deps,
                                 std::vector<ArtifactDigest> artifacts, std::string at) {
  SnapshotCapture snap{stage, std::move(at), {}, std::move(artifacts)};
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& d : deps) {
    const std::string key = package_key(d.ecosystem, d.name);
    auto [it, inserted] = index.try_emplace(key, snap.dependencies.size());
    if (inserted) {
      snap.dependencies.push_back(d);
      continue;
    }
    DependencyDecl& kept = snap.dependencies[it->second];
    if (kept.version != d.version)
      kept.source += " [conflict: " + d.version.value_or("unversioned") + " from " + d.source + "]";
  }
  std::sort(snap.dependencies.begin(), snap.dependencies.end(),
            [](const DependencyDecl& a, const DependencyDecl& b) {
              return std::tie(a.name, a.ecosystem) < std::tie(b.name, b.ecosystem);
            });
  std::stable_sort(snap.artifacts.begin(), snap.artifacts.end(),
                   [](const ArtifactDigest& a, const ArtifactDigest& b) {
                     return a.source_name < b.source_name;
                   });
  return snap;
}

SnapshotDiff diff_snapshots(const SnapshotCapture& before, const SnapshotCapture& after) {
  std::map<std::string, const DependencyDecl*> lhs, rhs;
  for (const auto& d : before.dependencies) lhs.try_emplace(package_key(d.ecosystem, d.name), &d);
  for (const auto& d : after.dependencies) rhs.try_emplace(package_key(d.ecosystem, d.name), &d);

  SnapshotDiff diff;
  for (const auto& [key, d] : lhs) {
    auto it = rhs.find(key);
    if (it == rhs.end()) diff.removed.push_back(*d);
    else if (d->version != it->second->version)
      diff.version_changed.push_back(
          VersionChange{d->ecosystem, it->second->name, d->version, it->second->version});
  }
  for (const auto& [key, d] : rhs)
    if (!lhs.contains(key)) diff.added.push_back(*d);
  return diff;
}

std::vector<ComponentRecord> snapshot_to_components(const SnapshotCapture& snapshot) {
  std::vector<ComponentRecord> out;
  out.reserve(snapshot.dependencies.size());
  for (const auto& d : snapshot.dependencies) {
    ComponentRecord c;
    c.type = "library";
    c.name = d.name;
    c.version = d.version.value_or(std::string(kUnresolvedVersion));
    c.properties.emplace();
    c.set_property("x-sacrospec-ecosystem", std::string(to_string(d.ecosystem)));
    c.set_property("x-sacrospec-source", d.source);
    if (d.version) {
      try {
        c.purl = to_purl(d).render();
      } catch (const DomainError&) {
        // ecosystem without a PURL type
      }
    } else {
      c.set_property(kUnverifiableProperty, "true");
    }
    auto art = std::find_if(snapshot.artifacts.begin(), snapshot.artifacts.end(),
                            [&](const ArtifactDigest& a) { return artifact_matches(a, d); });
    if (art != snapshot.artifacts.end())
      c.hashes.push_back(HashEntry{std::string(kSha256Alg), art->digest.hex()});
    else
      c.set_property(kHashUnavailableProperty, "true");
    out.push_back(std::move(c));
  }
  return out;
}

Json to_json(const DependencyDecl& d) {
  Json j = {{"ecosystem", to_string(d.ecosystem)}, {"name", d.name}, {"source", d.source}};
  j["version"] = d.version ? Json(*d.version) : Json(nullptr);
  return j;
}

Json to_json(const SnapshotCapture& s) {
  Json deps = Json::array();
  for (const auto& d : s.dependencies) deps.push_back(to_json(d));
  Json arts = Json::array();
  for (const auto& a : s.artifacts)
    arts.push_back({{"name", a.source_name},
                    {"byteSize", a.byte_size},
                    {"mimeType", a.mime_type},
                    {"digest", a.digest.prefixed()}});
  return {{"stage", to_string(s.stage)},
          {"timestamp", s.timestamp},
          {"dependencies", std::move(deps)},
          {"artifacts", std::move(arts)}};
}

Json to_json(const SnapshotDiff& diff) {
  Json added = Json::array(), removed = Json::array(), changed = Json::array();
  for (const auto& d : diff.added) added.push_back(to_json(d));
  for (const auto& d : diff.removed) removed.push_back(to_json(d));
  for (const auto& c : diff.version_changed)
    changed.push_back({{"ecosystem", to_string(c.ecosystem)},
                       {"name", c.name},
                       {"from", c.from ? Json(*c.from) : Json(nullptr)},
                       {"to", c.to ? Json(*c.to) : Json(nullptr)}});
  return {{"added", std::move(added)}, {"removed", std::move(removed)},
          {"versionChanged", std::move(changed)}};
}

}  // namespace aibom

#include "aibom/identifiers.hpp"

#include <cctype>
#include <vector>

#include "aibom/errors.hpp"

namespace aibom {
namespace {

bool purl_safe(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_' ||
         c == '~' || c == '+' || c == ':';
}

std::string percent_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (char c : s) {
    if (purl_safe(c)) {
      out += c;
    } else {
      const auto b = static_cast<unsigned char>(c);
      out += '%';
      out += kHex[b >> 4];
      out += kHex[b & 0x0f];
    }
  }
  return out;
}

std::optional<std::string> percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') {
      out += s[i];
      continue;
    }
    if (i + 2 >= s.size()) return std::nullopt;
    auto b = from_hex(s.substr(i + 1, 2));
    if (!b) return std::nullopt;
    out += static_cast<char>((*b)[0]);
    i += 2;
  }
  return out;
}

std::string cpe_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.' &&
        c != '*')
      out += '\\';
    out += c;
  }
  return out;
}

// Splits on ':' not preceded by a backslash escape, unescaping as it goes.
std::vector<std::string> cpe_fields(std::string_view s) {
  std::vector<std::string> fields(1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      fields.back() += s[++i];
    } else if (s[i] == ':') {
      fields.emplace_back();
    } else {
      fields.back() += s[i];
    }
  }
  return fields;
}

std::string alias_key(Ecosystem e, std::string_view package) { return package_key(e, package); }

}  // namespace

std::string Purl::render() const {
  std::string out = "pkg:" + type + "/";
  if (namespace_) out += percent_encode(*namespace_) + "/";
  out += percent_encode(name) + "@" + percent_encode(version);
  return out;
}

std::optional<Purl> Purl::parse(std::string_view text) {
  if (!text.starts_with("pkg:")) return std::nullopt;
  text.remove_prefix(4);
  if (auto cut = text.find_first_of("?#"); cut != std::string_view::npos) text = text.substr(0, cut);
  const auto at = text.rfind('@');
  if (at == std::string_view::npos) return std::nullopt;
  auto version = percent_decode(text.substr(at + 1));
  std::string_view path = text.substr(0, at);
  const auto slash = path.find('/');
  if (slash == std::string_view::npos || slash == 0) return std::nullopt;
  Purl p;
  p.type = to_lower_ascii(path.substr(0, slash));
  path.remove_prefix(slash + 1);
  const auto last = path.rfind('/');
  std::optional<std::string> name;
  if (last != std::string_view::npos) {
    auto ns = percent_decode(path.substr(0, last));
    if (!ns || ns->empty()) return std::nullopt;
    p.namespace_ = *ns;
    name = percent_decode(path.substr(last + 1));
  } else {
    name = percent_decode(path);
  }
  if (!name || name->empty() || !version || version->empty()) return std::nullopt;
  p.name = *name;
  p.version = *version;
  return p;
}

std::string purl_type_ecosystem(std::string_view purl_type) {
  if (purl_type == "pypi") return "pypi";
  if (purl_type == "conda") return "conda";
  if (purl_type == "deb") return "deb";
  return "other";
}

Purl to_purl(const DependencyDecl& dep) {
  if (!dep.version || dep.version->empty())
    throw DomainError("cannot build a PURL for " + dep.name + ": version unresolved");
  Purl p;
  p.version = *dep.version;
  switch (dep.ecosystem) {
    case Ecosystem::kPypi:
      p.type = "pypi";
      p.name = normalize_pypi_name(dep.name);
      break;
    case Ecosystem::kConda:
      p.type = "conda";
      p.name = dep.name;
      break;
    case Ecosystem::kDeb:
      p.type = "deb";
      p.namespace_ = "debian";
      p.name = dep.name;
      break;
    case Ecosystem::kOther:
      p.type = "generic";
      p.name = dep.name;
      break;
  }
  return p;
}

std::string CpeId::render() const {
  return "cpe:2.3:" + part + ":" + cpe_escape(vendor) + ":" + cpe_escape(product) + ":" +
         cpe_escape(version) + ":*:*:*:*:*:*:*";
}

std::optional<CpeId> CpeId::parse(std::string_view text) {
  const auto f = cpe_fields(text);
  if (f.size() != 13 || f[0] != "cpe" || f[1] != "2.3") return std::nullopt;
  if (f[2] != "a" && f[2] != "o" && f[2] != "h") return std::nullopt;
  if (f[3].empty() || f[4].empty() || f[5].empty()) return std::nullopt;
  return CpeId{f[2], f[3], f[4], f[5]};
}

const CpeAliasTable& CpeAliasTable::bundled() {
  static const CpeAliasTable kTable = [] {
    CpeAliasTable t;
    const struct {
      Ecosystem eco;
      const char* package;
      const char* vendor;
      const char* product;
    } kEntries[] = {
        {Ecosystem::kPypi, "tensorflow", "google", "tensorflow"},
        {Ecosystem::kPypi, "tensorflow-cpu", "google", "tensorflow"},
        {Ecosystem::kPypi, "tensorflow-gpu", "google", "tensorflow"},
        {Ecosystem::kPypi, "torch", "linuxfoundation", "pytorch"},
        {Ecosystem::kPypi, "numpy", "numpy", "numpy"},
        {Ecosystem::kPypi, "scipy", "scipy", "scipy"},
        {Ecosystem::kPypi, "pillow", "python", "pillow"},
        {Ecosystem::kPypi, "requests", "python", "requests"},
        {Ecosystem::kPypi, "urllib3", "python", "urllib3"},
        {Ecosystem::kPypi, "setuptools", "python", "setuptools"},
        {Ecosystem::kPypi, "jinja2", "palletsprojects", "jinja"},
        {Ecosystem::kPypi, "flask", "palletsprojects", "flask"},
        {Ecosystem::kPypi, "werkzeug", "palletsprojects", "werkzeug"},
        {Ecosystem::kPypi, "pyyaml", "pyyaml", "pyyaml"},
        {Ecosystem::kPypi, "lxml", "lxml", "lxml"},
        {Ecosystem::kPypi, "cryptography", "cryptography_project", "cryptography"},
        {Ecosystem::kPypi, "aiohttp", "aiohttp", "aiohttp"},
        {Ecosystem::kPypi, "transformers", "huggingface", "transformers"},
        {Ecosystem::kPypi, "mlflow", "lfprojects", "mlflow"},
        {Ecosystem::kConda, "python", "python", "python"},
        {Ecosystem::kConda, "openssl", "openssl", "openssl"},
        {Ecosystem::kDeb, "openssl", "openssl", "openssl"},
        {Ecosystem::kDeb, "libssl3", "openssl", "openssl"},
        {Ecosystem::kDeb, "curl", "haxx", "curl"},
        {Ecosystem::kDeb, "libcurl4", "haxx", "libcurl"},
        {Ecosystem::kDeb, "libxml2", "xmlsoft", "libxml2"},
        {Ecosystem::kDeb, "zlib1g", "zlib", "zlib"},
        {Ecosystem::kDeb, "openldap", "openldap", "openldap"},
        {Ecosystem::kDeb, "libldap-2.5-0", "openldap", "openldap"},
        {Ecosystem::kDeb, "libsqlite3-0", "sqlite", "sqlite"},
        {Ecosystem::kDeb, "libc6", "gnu", "glibc"},
    };
    for (const auto& e : kEntries) t.add(e.eco, e.package, e.vendor, e.product);
    return t;
  }();
  return kTable;
}

CpeAliasTable CpeAliasTable::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw StructuralError("/", "alias table must be an object");
  CpeAliasTable t;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const auto slash = key.find('/');
    const auto eco = slash == std::string::npos ? std::nullopt : parse_ecosystem(key.substr(0, slash));
    const auto& v = it.value();
    if (!eco || !v.is_array() || v.size() != 2 || !v[0].is_string() || !v[1].is_string())
      throw StructuralError("/" + key, "expected \"<ecosystem>/<package>\": [vendor, product]");
    t.add(*eco, key.substr(slash + 1), v[0].get<std::string>(), v[1].get<std::string>());
  }
  return t;
}

void CpeAliasTable::add(Ecosystem ecosystem, std::string_view package, std::string vendor,
                        std::string product) {
  entries_[alias_key(ecosystem, package)] = {to_lower_ascii(vendor), to_lower_ascii(product)};
}

std::optional<std::pair<std::string, std::string>> CpeAliasTable::lookup(
    Ecosystem ecosystem, std::string_view package) const {
  auto it = entries_.find(alias_key(ecosystem, package));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void CpeAliasTable::merge(const CpeAliasTable& other) {
  for (const auto& [k, v] : other.entries_) entries_[k] = v;
}

std::optional<CpeId> to_cpe(const DependencyDecl& dep, const CpeAliasTable& aliases) {
  if (!dep.version || dep.version->empty()) return std::nullopt;
  auto alias = aliases.lookup(dep.ecosystem, dep.name);
  if (!alias) return std::nullopt;
  return CpeId{"a", alias->first, alias->second, *dep.version};
}

}  // namespace aibom

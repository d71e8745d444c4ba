#include "aibom/validator.hpp"

#include <algorithm>
#include <map>

#include "aibom/encoding.hpp"
#include "aibom/errors.hpp"
#include "aibom/io.hpp"

namespace aibom {
namespace {

const std::set<std::string, std::less<>>& accepted_component_types() {
  // SACRO component kinds plus the CycloneDX 1.5 base enumeration, so that
  // plain CycloneDX documents remain acceptable.
  static const std::set<std::string, std::less<>> kTypes = {
      "application", "ai-model", "library", "container", "framework",
      "platform", "operating-system", "device", "device-driver", "firmware",
      "file", "machine-learning-model", "data"};
  return kTypes;
}

std::string pointer(const std::string& parent, std::string_view key) {
  std::string out = parent + "/";
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

std::string pointer(const std::string& parent, std::size_t index) {
  return parent + "/" + std::to_string(index);
}

class Checker {
 public:
  explicit Checker(const ValidationOptions& options) : options_(options) {}

  void check_document(const Json& root) {
    if (!root.is_object()) {
      add("", rule::kType, std::string("document must be an object, found ") + root.type_name());
      return;
    }
    require(root, "", {"bomFormat", "specVersion", "version", "metadata", "components"});

    if (const Json* v = string_field(root, "", "bomFormat"); v && *v != kBomFormat)
      add("/bomFormat", rule::kEnum, quoted(*v) + " is not one of [\"CycloneDX\"]");
    if (const Json* v = string_field(root, "", "specVersion"); v && *v != kSpecVersion)
      add("/specVersion", rule::kPattern, quoted(*v) + " does not match '^1\\.5$'");
    if (auto it = root.find("version"); it != root.end()) {
      if (!it->is_number_integer())
        add("/version", rule::kType, std::string(it->type_name()) + " is not of type 'integer'");
      else if (it->get<std::int64_t>() < 1)
        add("/version", rule::kMinimum, "version must be at least 1");
    }

    if (auto it = root.find("metadata"); it != root.end()) check_metadata(*it, "/metadata");

    if (const Json* comps = array_field(root, "", "components")) {
      for (std::size_t i = 0; i < comps->size(); ++i)
        check_component((*comps)[i], pointer("/components", i), true);
    }

    if (const Json* refs = array_field(root, "", "externalReferences")) {
      for (std::size_t i = 0; i < refs->size(); ++i)
        check_reference((*refs)[i], pointer("/externalReferences", i));
    }

    if (auto it = root.find("signature"); it != root.end()) check_signature(*it, "/signature");
  }

  std::vector<Violation> take() {
    // Fixed ordering: first appearance of each path in traversal order, then rule id.
    std::map<std::string, std::size_t, std::less<>> first_seen;
    for (std::size_t i = 0; i < violations_.size(); ++i)
      first_seen.try_emplace(violations_[i].path, i);
    std::stable_sort(violations_.begin(), violations_.end(),
                     [&](const Violation& a, const Violation& b) {
                       const auto ia = first_seen[a.path];
                       const auto ib = first_seen[b.path];
                       if (ia != ib) return ia < ib;
                       return a.rule < b.rule;
                     });
    return std::move(violations_);
  }

 private:
  static std::string quoted(const Json& v) { return v.dump(); }

  void add(std::string path, std::string_view rule_id, std::string message) {
    violations_.push_back(Violation{std::move(path), std::string(rule_id), std::move(message)});
  }

  bool expect_object(const Json& j, const std::string& path) {
    if (j.is_object()) return true;
    add(path, rule::kType, std::string(j.type_name()) + " is not of type 'object'");
    return false;
  }

  void require(const Json& obj, const std::string& path,
               std::initializer_list<std::string_view> keys) {
    for (auto k : keys) {
      if (!obj.contains(k))
        add(path, rule::kRequiredField, "'" + std::string(k) + "' is a required property");
    }
  }

  // Returns the field if present and a string; reports a type violation otherwise.
  const Json* string_field(const Json& obj, const std::string& path, std::string_view key) {
    auto it = obj.find(key);
    if (it == obj.end()) return nullptr;
    if (!it->is_string()) {
      add(pointer(path, key), rule::kType, std::string(it->type_name()) + " is not of type 'string'");
      return nullptr;
    }
    return &*it;
  }

  const Json* array_field(const Json& obj, const std::string& path, std::string_view key) {
    auto it = obj.find(key);
    if (it == obj.end()) return nullptr;
    if (!it->is_array()) {
      add(pointer(path, key), rule::kType, std::string(it->type_name()) + " is not of type 'array'");
      return nullptr;
    }
    return &*it;
  }

  void check_timestamp(const Json& obj, const std::string& path) {
    if (const Json* ts = string_field(obj, path, "timestamp");
        ts && !is_rfc3339(ts->get_ref<const std::string&>()))
      add(pointer(path, "timestamp"), rule::kTimestampFormat,
          quoted(*ts) + " is not a valid RFC 3339 date-time");
  }

  void check_metadata(const Json& meta, const std::string& path) {
    if (!expect_object(meta, path)) return;
    require(meta, path, {"timestamp", "tools", "component"});
    check_timestamp(meta, path);

    if (const Json* tools = array_field(meta, path, "tools")) {
      if (tools->empty())
        add(pointer(path, "tools"), rule::kMinItems, "at least one tool descriptor is required");
      for (std::size_t i = 0; i < tools->size(); ++i) {
        const std::string tp = pointer(pointer(path, "tools"), i);
        const Json& tool = (*tools)[i];
        if (!expect_object(tool, tp)) continue;
        require(tool, tp, {"vendor", "name", "version"});
        for (auto k : {"vendor", "name", "version"}) string_field(tool, tp, k);
      }
    }
    if (auto it = meta.find("component"); it != meta.end())
      check_component(*it, pointer(path, "component"), false);
  }

  void check_component(const Json& c, const std::string& path, bool properties_required) {
    if (!expect_object(c, path)) return;
    if (properties_required)
      require(c, path, {"type", "name", "version", "hashes", "properties"});
    else
      require(c, path, {"type", "name", "version", "hashes"});

    std::string type;
    if (const Json* t = string_field(c, path, "type")) {
      type = t->get<std::string>();
      if (!accepted_component_types().contains(type))
        add(pointer(path, "type"), rule::kComponentType,
            quoted(*t) + " is not a recognised component type");
    }
    string_field(c, path, "name");
    string_field(c, path, "version");
    string_field(c, path, "purl");

    bool hash_unavailable = false;
    const Json* props = array_field(c, path, "properties");
    if (props) {
      const std::string pp = pointer(path, "properties");
      for (std::size_t i = 0; i < props->size(); ++i) {
        const Json& p = (*props)[i];
        const std::string ip = pointer(pp, i);
        if (!expect_object(p, ip)) continue;
        require(p, ip, {"name", "value"});
        const Json* name = string_field(p, ip, "name");
        const Json* value = string_field(p, ip, "value");
        if (name && value) {
          const auto& n = name->get_ref<const std::string&>();
          if (n == "x-sacrospec-hash-unavailable" && *value == "true") hash_unavailable = true;
          check_extension(n, value->get_ref<const std::string&>(), ip);
        }
      }
      if (type == "ai-model" && props->empty())
        add(pp, rule::kModelProperties, "ai-model components must carry extension properties");
    } else if (type == "ai-model" && !c.contains("properties") && !properties_required) {
      add(path, rule::kModelProperties, "ai-model components must carry extension properties");
    }

    if (const Json* hashes = array_field(c, path, "hashes")) {
      const std::string hp = pointer(path, "hashes");
      if (hashes->empty() && !hash_unavailable)
        add(hp, rule::kHashMissing, "component carries no cryptographic hash");
      for (std::size_t i = 0; i < hashes->size(); ++i) check_hash((*hashes)[i], pointer(hp, i));
    }

    if (const Json* nested = array_field(c, path, "components")) {
      for (std::size_t i = 0; i < nested->size(); ++i)
        check_component((*nested)[i], pointer(pointer(path, "components"), i), true);
    }
  }

  void check_hash(const Json& h, const std::string& path) {
    if (!expect_object(h, path)) return;
    require(h, path, {"alg", "content"});
    const Json* alg = string_field(h, path, "alg");
    const Json* content = string_field(h, path, "content");
    if (alg && alg->get_ref<const std::string&>().empty())
      add(pointer(path, "alg"), rule::kPattern, "hash algorithm name is empty");
    if (alg && content && *alg == kSha256Alg &&
        !is_lower_hex(content->get_ref<const std::string&>(), 64))
      add(pointer(path, "content"), rule::kHashFormat,
          "SHA-256 content must be 64 lowercase hex characters");
  }

  void check_extension(const std::string& name, const std::string& value,
                       const std::string& path) {
    auto field = sacro_field_of(name);
    if (!field) return;
    if (options_.strict && !name.starts_with(kExtensionPrefix))
      add(pointer(path, "name"), rule::kExtensionPrefix,
          "extension property '" + name + "' must be named '" + std::string(kExtensionPrefix) +
              name + "' in strict mode");

    const std::string vp = pointer(path, "value");
    if (*field == "disclosureControlType") {
      if (!disclosure_control_vocabulary().contains(value) &&
          !options_.extra_vocabulary.contains(value))
        add(vp, rule::kVocabulary,
            "\"" + value + "\" is not in the disclosure-control vocabulary");
    } else if (*field == "treContainerHash" || *field == "outputDigest") {
      if (!value.starts_with(Sha256Digest::kPrefix) ||
          !is_lower_hex(std::string_view(value).substr(Sha256Digest::kPrefix.size()), 64))
        add(vp, rule::kDigestFormat, "expected \"sha256:\" followed by 64 lowercase hex characters");
    } else if (*field == "modelReference") {
      std::string_view hex = value;
      if (hex.starts_with(Sha256Digest::kPrefix)) hex.remove_prefix(Sha256Digest::kPrefix.size());
      if (!is_lower_hex(hex, 64))
        add(vp, rule::kDigestFormat, "expected a SHA-256 digest of 64 lowercase hex characters");
    }
  }

  void check_reference(const Json& r, const std::string& path) {
    if (!expect_object(r, path)) return;
    require(r, path, {"type", "url"});
    string_field(r, path, "type");
    if (const Json* url = string_field(r, path, "url");
        url && !is_absolute_url(url->get_ref<const std::string&>()))
      add(pointer(path, "url"), rule::kUrlFormat, quoted(*url) + " is not an absolute URL");
  }

  void check_signature(const Json& s, const std::string& path) {
    if (!expect_object(s, path)) return;
    require(s, path, {"alg", "publicKey", "signature", "timestamp"});
    if (const Json* alg = string_field(s, path, "alg"); alg && *alg != "Ed25519" && *alg != "ECDSA")
      add(pointer(path, "alg"), rule::kSignatureAlg,
          quoted(*alg) + " is not one of [\"Ed25519\", \"ECDSA\"]");
    for (auto key : {"publicKey", "signature"}) {
      if (const Json* v = string_field(s, path, key);
          v && !base64_decode(v->get_ref<const std::string&>()))
        add(pointer(path, key), rule::kBase64, "value is not valid base64");
    }
    check_timestamp(s, path);
  }

  const ValidationOptions& options_;
  std::vector<Violation> violations_;
};

}  // namespace

const std::vector<RuleInfo>& rule_set() {
  static const std::vector<RuleInfo> kRules = [] {
    std::vector<RuleInfo> r = {
        {rule::kJsonSyntax, "structural", "input is not well-formed JSON"},
        {rule::kType, "structural", "value has the wrong JSON type"},
        {rule::kRequiredField, "structural", "a required property is absent"},
        {rule::kEnum, "structural", "value outside its enumeration (bomFormat)"},
        {rule::kPattern, "structural", "value does not match its pattern (specVersion)"},
        {rule::kMinimum, "structural", "integer below its minimum (version)"},
        {rule::kMinItems, "structural", "array shorter than required (tools)"},
        {rule::kHashFormat, "semantic", "SHA-256 digest is not 64 lowercase hex characters"},
        {rule::kHashMissing, "semantic", "component carries no hash and is not flagged unavailable"},
        {rule::kTimestampFormat, "semantic", "timestamp is not an RFC 3339 date-time"},
        {rule::kComponentType, "semantic", "component type is not recognised"},
        {rule::kModelProperties, "semantic", "ai-model component without extension properties"},
        {rule::kVocabulary, "semantic", "disclosure-control token outside the vocabulary"},
        {rule::kDigestFormat, "semantic", "extension digest is malformed"},
        {rule::kExtensionPrefix, "semantic", "strict mode: extension property lacks x-sacrospec-"},
        {rule::kUrlFormat, "semantic", "external reference URL is not absolute"},
        {rule::kSignatureAlg, "semantic", "unsupported signature algorithm"},
        {rule::kBase64, "semantic", "signature material is not base64"},
    };
    std::sort(r.begin(), r.end(), [](const RuleInfo& a, const RuleInfo& b) { return a.id < b.id; });
    return r;
  }();
  return kRules;
}

bool ValidationReport::has_rule(std::string_view rule_id) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.rule == rule_id; });
}

bool ValidationReport::has_path(std::string_view path) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.path == path; });
}

ValidationReport validate_json(const Json& root, const ValidationOptions& options) {
  Checker checker(options);
  checker.check_document(root);
  ValidationReport report;
  report.violations = checker.take();
  report.valid = report.violations.empty();
  return report;
}

ValidationReport validate_structure(std::string_view json, const ValidationOptions& options) {
  Json root;
  try {
    root = Json::parse(json);
  } catch (const Json::parse_error& e) {
    ValidationReport report;
    report.valid = false;
    report.violations.push_back(
        Violation{"", std::string(rule::kJsonSyntax),
                  "malformed JSON at byte " + std::to_string(e.byte == 0 ? 0 : e.byte - 1) +
                      ": " + e.what()});
    return report;
  }
  return validate_json(root, options);
}

ValidationReport validate_file(const std::filesystem::path& path,
                               const ValidationOptions& options) {
  return validate_structure(read_file(path), options);
}

Json to_json(const ValidationReport& report) {
  Json violations = Json::array();
  for (const auto& v : report.violations)
    violations.push_back({{"path", v.path}, {"rule", v.rule}, {"message", v.message}});
  return {{"valid", report.valid},
          {"violations", std::move(violations)},
          {"ruleSetVersion", report.rule_set_version}};
}

}  // namespace aibom

#include "aibom/model.hpp"

#include <algorithm>
#include <cctype>

#include "aibom/encoding.hpp"
#include "aibom/errors.hpp"

namespace aibom {
namespace {

std::string child_path(const std::string& parent, std::string_view key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~') escaped += "~0";
    else if (c == '/') escaped += "~1";
    else escaped += c;
  }
  return parent + "/" + escaped;
}

std::string child_path(const std::string& parent, std::size_t index) {
  return parent + "/" + std::to_string(index);
}

const char* type_label(const Json& j) { return j.type_name(); }

void expect_object(const Json& j, const std::string& path) {
  if (!j.is_object())
    throw StructuralError(path.empty() ? "/" : path,
                          std::string("expected object, found ") + type_label(j));
}

const Json& require_key(const Json& obj, std::string_view key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw StructuralError(child_path(path, key), "required field is missing");
  return *it;
}

std::string require_string(const Json& obj, std::string_view key, const std::string& path) {
  const Json& v = require_key(obj, key, path);
  if (!v.is_string())
    throw StructuralError(child_path(path, key),
                          std::string("expected string, found ") + type_label(v));
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const Json& obj, std::string_view key,
                                           const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  if (!it->is_string())
    throw StructuralError(child_path(path, key),
                          std::string("expected string, found ") + type_label(*it));
  return it->get<std::string>();
}

const Json& require_array(const Json& obj, std::string_view key, const std::string& path) {
  const Json& v = require_key(obj, key, path);
  if (!v.is_array())
    throw StructuralError(child_path(path, key),
                          std::string("expected array, found ") + type_label(v));
  return v;
}

const Json* optional_array(const Json& obj, std::string_view key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return nullptr;
  if (!it->is_array())
    throw StructuralError(child_path(path, key),
                          std::string("expected array, found ") + type_label(*it));
  return &*it;
}

Json extras_of(const Json& obj, std::initializer_list<std::string_view> known) {
  Json extra = Json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      extra[it.key()] = it.value();
  }
  return extra;
}

// Lowercases hex digests ("abc..." or "sha256:ABC...") and leaves any other
// string untouched.
std::string normalize_digest_text(const std::string& s) {
  std::string_view body = s;
  std::string prefix;
  if (s.size() > Sha256Digest::kPrefix.size() &&
      to_lower_ascii(s.substr(0, Sha256Digest::kPrefix.size())) == Sha256Digest::kPrefix) {
    prefix = std::string(Sha256Digest::kPrefix);
    body.remove_prefix(Sha256Digest::kPrefix.size());
  }
  if (body.empty() || !std::all_of(body.begin(), body.end(), [](char c) {
        return std::isxdigit(static_cast<unsigned char>(c));
      }))
    return s;
  return prefix + to_lower_ascii(body);
}

bool is_digest_property(std::string_view name) {
  auto field = sacro_field_of(name);
  return field && (*field == "modelReference" || *field == "treContainerHash" ||
                   *field == "outputDigest");
}

HashEntry hash_from_json(const Json& j, const std::string& path) {
  expect_object(j, path);
  HashEntry h;
  h.alg = require_string(j, "alg", path);
  h.content = normalize_digest_text(require_string(j, "content", path));
  h.extra = extras_of(j, {"alg", "content"});
  return h;
}

PropertyEntry property_from_json(const Json& j, const std::string& path) {
  expect_object(j, path);
  PropertyEntry p;
  p.name = require_string(j, "name", path);
  p.value = require_string(j, "value", path);
  if (is_digest_property(p.name)) p.value = normalize_digest_text(p.value);
  p.extra = extras_of(j, {"name", "value"});
  return p;
}

ComponentRecord component_from_json(const Json& j, const std::string& path) {
  expect_object(j, path);
  ComponentRecord c;
  c.type = require_string(j, "type", path);
  c.name = require_string(j, "name", path);
  c.version = require_string(j, "version", path);
  c.purl = optional_string(j, "purl", path);

  const Json& hashes = require_array(j, "hashes", path);
  const std::string hashes_path = child_path(path, "hashes");
  for (std::size_t i = 0; i < hashes.size(); ++i)
    c.hashes.push_back(hash_from_json(hashes[i], child_path(hashes_path, i)));

  if (const Json* props = optional_array(j, "properties", path)) {
    const std::string props_path = child_path(path, "properties");
    c.properties.emplace();
    for (std::size_t i = 0; i < props->size(); ++i)
      c.properties->push_back(property_from_json((*props)[i], child_path(props_path, i)));
  }
  if (const Json* nested = optional_array(j, "components", path)) {
    const std::string nested_path = child_path(path, "components");
    c.components.emplace();
    for (std::size_t i = 0; i < nested->size(); ++i)
      c.components->push_back(component_from_json((*nested)[i], child_path(nested_path, i)));
  }
  c.extra =
      extras_of(j, {"type", "name", "version", "purl", "hashes", "properties", "components"});
  return c;
}

ToolDescriptor tool_from_json(const Json& j, const std::string& path) {
  expect_object(j, path);
  ToolDescriptor t;
  t.vendor = require_string(j, "vendor", path);
  t.name = require_string(j, "name", path);
  t.version = require_string(j, "version", path);
  t.extra = extras_of(j, {"vendor", "name", "version"});
  return t;
}

Json to_json(const HashEntry& h) {
  Json j = h.extra;
  j["alg"] = h.alg;
  j["content"] = h.content;
  return j;
}

Json to_json(const PropertyEntry& p) {
  Json j = p.extra;
  j["name"] = p.name;
  j["value"] = p.value;
  return j;
}

Json to_json(const ToolDescriptor& t) {
  Json j = t.extra;
  j["vendor"] = t.vendor;
  j["name"] = t.name;
  j["version"] = t.version;
  return j;
}

void collect(const std::vector<ComponentRecord>& in, std::vector<const ComponentRecord*>& out) {
  for (const auto& c : in) {
    out.push_back(&c);
    if (c.components) collect(*c.components, out);
  }
}

}  // namespace

const std::string* ComponentRecord::property(std::string_view key) const {
  if (!properties) return nullptr;
  for (const auto& p : *properties)
    if (p.name == key) return &p.value;
  return nullptr;
}

void ComponentRecord::set_property(std::string_view key, std::string value) {
  if (!properties) properties.emplace();
  auto it = std::find_if(properties->begin(), properties->end(),
                         [&](const PropertyEntry& p) { return p.name == key; });
  if (it == properties->end()) {
    properties->push_back(PropertyEntry{std::string(key), std::move(value)});
    return;
  }
  it->value = std::move(value);
  properties->erase(std::remove_if(std::next(it), properties->end(),
                                   [&](const PropertyEntry& p) { return p.name == key; }),
                    properties->end());
}

std::size_t ComponentRecord::remove_property(std::string_view key) {
  if (!properties) return 0;
  const auto before = properties->size();
  std::erase_if(*properties, [&](const PropertyEntry& p) { return p.name == key; });
  return before - properties->size();
}

const HashEntry* ComponentRecord::sha256_hash() const {
  for (const auto& h : hashes)
    if (h.alg == kSha256Alg) return &h;
  return nullptr;
}

bool SacroExtensions::empty() const {
  return !model_reference && !training_data_source && !inference_context &&
         !tre_container_hash && !disclosure_control_type && !output_digest;
}

std::optional<std::string_view> sacro_field_of(std::string_view property_name) {
  if (property_name.starts_with(kExtensionPrefix))
    property_name.remove_prefix(kExtensionPrefix.size());
  for (auto field : kSacroFieldNames)
    if (field == property_name) return field;
  return std::nullopt;
}

const std::set<std::string, std::less<>>& disclosure_control_vocabulary() {
  static const std::set<std::string, std::less<>> kVocabulary = {
      "cell-suppression", "diff-privacy-laplace", "top-coding"};
  return kVocabulary;
}

AibomDocument document_from_json(const Json& root) {
  const std::string path;
  expect_object(root, path);
  AibomDocument doc;
  doc.bom_format = require_string(root, "bomFormat", path);
  doc.spec_version = require_string(root, "specVersion", path);

  const Json& version = require_key(root, "version", path);
  if (!version.is_number_integer())
    throw StructuralError("/version",
                          std::string("expected integer, found ") + type_label(version));
  doc.version = version.get<std::int64_t>();

  const Json& meta = require_key(root, "metadata", path);
  expect_object(meta, "/metadata");
  doc.metadata.timestamp = require_string(meta, "timestamp", "/metadata");
  const Json& tools = require_array(meta, "tools", "/metadata");
  for (std::size_t i = 0; i < tools.size(); ++i)
    doc.metadata.tools.push_back(tool_from_json(tools[i], child_path("/metadata/tools", i)));
  doc.metadata.component =
      component_from_json(require_key(meta, "component", "/metadata"), "/metadata/component");
  doc.metadata.extra = extras_of(meta, {"timestamp", "tools", "component"});

  const Json& comps = require_array(root, "components", path);
  for (std::size_t i = 0; i < comps.size(); ++i)
    doc.components.push_back(component_from_json(comps[i], child_path("/components", i)));

  if (const Json* refs = optional_array(root, "externalReferences", path)) {
    doc.external_references.emplace();
    for (std::size_t i = 0; i < refs->size(); ++i) {
      const std::string p = child_path("/externalReferences", i);
      const Json& r = (*refs)[i];
      expect_object(r, p);
      doc.external_references->push_back(ExternalReference{
          require_string(r, "type", p), require_string(r, "url", p), extras_of(r, {"type", "url"})});
    }
  }

  if (auto it = root.find("signature"); it != root.end()) {
    expect_object(*it, "/signature");
    SignatureEnvelope s;
    s.alg = require_string(*it, "alg", "/signature");
    s.public_key = require_string(*it, "publicKey", "/signature");
    s.signature = require_string(*it, "signature", "/signature");
    s.timestamp = require_string(*it, "timestamp", "/signature");
    s.extra = extras_of(*it, {"alg", "publicKey", "signature", "timestamp"});
    doc.signature = std::move(s);
  }

  doc.extra = extras_of(root, {"bomFormat", "specVersion", "version", "metadata", "components",
                               "externalReferences", "signature"});
  return doc;
}

AibomDocument parse_document(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what(), e.byte == 0 ? 0 : e.byte - 1);
  }
  return document_from_json(root);
}

Json to_json(const ComponentRecord& c) {
  Json j = c.extra;
  j["type"] = c.type;
  j["name"] = c.name;
  j["version"] = c.version;
  if (c.purl) j["purl"] = *c.purl;
  Json hashes = Json::array();
  for (const auto& h : c.hashes) hashes.push_back(to_json(h));
  j["hashes"] = std::move(hashes);
  if (c.properties) {
    Json props = Json::array();
    for (const auto& p : *c.properties) props.push_back(to_json(p));
    j["properties"] = std::move(props);
  }
  if (c.components) {
    Json nested = Json::array();
    for (const auto& n : *c.components) nested.push_back(to_json(n));
    j["components"] = std::move(nested);
  }
  return j;
}

Json to_json(const AibomDocument& doc, bool include_signature) {
  Json j = doc.extra;
  j["bomFormat"] = doc.bom_format;
  j["specVersion"] = doc.spec_version;
  j["version"] = doc.version;

  Json meta = doc.metadata.extra;
  meta["timestamp"] = doc.metadata.timestamp;
  Json tools = Json::array();
  for (const auto& t : doc.metadata.tools) tools.push_back(to_json(t));
  meta["tools"] = std::move(tools);
  meta["component"] = to_json(doc.metadata.component);
  j["metadata"] = std::move(meta);

  Json comps = Json::array();
  for (const auto& c : doc.components) comps.push_back(to_json(c));
  j["components"] = std::move(comps);

  if (doc.external_references) {
    Json refs = Json::array();
    for (const auto& r : *doc.external_references) {
      Json rj = r.extra;
      rj["type"] = r.type;
      rj["url"] = r.url;
      refs.push_back(std::move(rj));
    }
    j["externalReferences"] = std::move(refs);
  }
  if (include_signature && doc.signature) {
    Json s = doc.signature->extra;
    s["alg"] = doc.signature->alg;
    s["publicKey"] = doc.signature->public_key;
    s["signature"] = doc.signature->signature;
    s["timestamp"] = doc.signature->timestamp;
    j["signature"] = std::move(s);
  }
  return j;
}

std::string serialize_canonical(const AibomDocument& doc) {
  return to_json(doc, false).dump(-1, ' ', false, Json::error_handler_t::strict);
}

std::string serialize_pretty(const AibomDocument& doc) {
  return to_json(doc, true).dump(2) + "\n";
}

SacroExtensions extract_sacro_properties(const ComponentRecord& component) {
  SacroExtensions ext;
  if (!component.properties) return ext;
  std::array<std::optional<std::string>*, 6> slots = {
      &ext.model_reference,          &ext.training_data_source, &ext.inference_context,
      &ext.tre_container_hash,       &ext.disclosure_control_type, &ext.output_digest};
  std::array<std::string, 6> first_entry;

  for (const auto& p : *component.properties) {
    auto field = sacro_field_of(p.name);
    if (!field) continue;
    const auto idx = static_cast<std::size_t>(
        std::find(kSacroFieldNames.begin(), kSacroFieldNames.end(), *field) -
        kSacroFieldNames.begin());
    auto& slot = *slots[idx];
    if (!slot) {
      slot = p.value;
      first_entry[idx] = p.name;
    } else if (*slot != p.value) {
      throw AmbiguityError("conflicting values for " + std::string(*field) + ": " +
                           first_entry[idx] + "=\"" + *slot + "\" vs " + p.name + "=\"" +
                           p.value + "\"");
    }
  }
  return ext;
}

std::vector<const ComponentRecord*> flatten_components(const AibomDocument& doc) {
  std::vector<const ComponentRecord*> out;
  collect(doc.components, out);
  return out;
}

}  // namespace aibom

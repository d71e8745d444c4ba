#pragma once

// Document object model for SACRO-extended CycloneDX 1.5 AI bills of
// materials. Every object keeps the keys it does not interpret in `extra`
// so that documents survive a parse/serialize cycle untouched.

#include <json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace aibom {

using Json = nlohmann::json;

inline constexpr std::string_view kBomFormat = "CycloneDX";
inline constexpr std::string_view kSpecVersion = "1.5";
inline constexpr std::string_view kSha256Alg = "SHA-256";
inline constexpr std::string_view kExtensionPrefix = "x-sacrospec-";

struct HashEntry {
  std::string alg;
  std::string content;
  Json extra = Json::object();
  friend bool operator==(const HashEntry&, const HashEntry&) = default;
};

struct PropertyEntry {
  std::string name;
  std::string value;
  Json extra = Json::object();
  friend bool operator==(const PropertyEntry&, const PropertyEntry&) = default;
};

struct ComponentRecord {
  std::string type;
  std::string name;
  std::string version;
  std::optional<std::string> purl;
  std::vector<HashEntry> hashes;
  std::optional<std::vector<PropertyEntry>> properties;
  /// CycloneDX nested sub-components.
  std::optional<std::vector<ComponentRecord>> components;
  Json extra = Json::object();

  /// First property with this exact name.
  const std::string* property(std::string_view name) const;
  /// Replaces every entry named `name` with a single entry, or appends one.
  void set_property(std::string_view name, std::string value);
  /// Removes all entries named `name`; returns how many were removed.
  std::size_t remove_property(std::string_view name);
  /// First SHA-256 hash entry, if any.
  const HashEntry* sha256_hash() const;

  friend bool operator==(const ComponentRecord&, const ComponentRecord&) = default;
};

struct ToolDescriptor {
  std::string vendor;
  std::string name;
  std::string version;
  Json extra = Json::object();
  friend bool operator==(const ToolDescriptor&, const ToolDescriptor&) = default;
};

struct DocumentMetadata {
  std::string timestamp;
  std::vector<ToolDescriptor> tools;
  ComponentRecord component;
  Json extra = Json::object();
  friend bool operator==(const DocumentMetadata&, const DocumentMetadata&) = default;
};

struct ExternalReference {
  std::string type;
  std::string url;
  Json extra = Json::object();
  friend bool operator==(const ExternalReference&, const ExternalReference&) = default;
};

struct SignatureEnvelope {
  std::string alg;
  std::string public_key;
  std::string signature;
  std::string timestamp;
  Json extra = Json::object();
  friend bool operator==(const SignatureEnvelope&, const SignatureEnvelope&) = default;
};

struct AibomDocument {
  std::string bom_format{kBomFormat};
  std::string spec_version{kSpecVersion};
  std::int64_t version = 1;
  DocumentMetadata metadata;
  std::vector<ComponentRecord> components;
  std::optional<std::vector<ExternalReference>> external_references;
  std::optional<SignatureEnvelope> signature;
  Json extra = Json::object();
  friend bool operator==(const AibomDocument&, const AibomDocument&) = default;
};

/// The six SACRO extension fields. Values are the raw property strings.
struct SacroExtensions {
  std::optional<std::string> model_reference;
  std::optional<std::string> training_data_source;
  std::optional<std::string> inference_context;
  std::optional<std::string> tre_container_hash;
  std::optional<std::string> disclosure_control_type;
  std::optional<std::string> output_digest;

  bool empty() const;
  friend bool operator==(const SacroExtensions&, const SacroExtensions&) = default;
};

/// Bare names of the extension fields, in declaration order.
inline constexpr std::array<std::string_view, 6> kSacroFieldNames = {
    "modelReference",  "trainingDataSource",    "inferenceContext",
    "treContainerHash", "disclosureControlType", "outputDigest"};

/// Maps "outputDigest" and "x-sacrospec-outputDigest" to "outputDigest";
/// returns nullopt for names that are not extension fields.
std::optional<std::string_view> sacro_field_of(std::string_view property_name);

/// Built-in disclosure-control vocabulary.
const std::set<std::string, std::less<>>& disclosure_control_vocabulary();

/// Parses UTF-8 JSON. Throws ParseError (byte offset) on malformed text and
/// StructuralError (JSON pointer path) when a known field has the wrong type
/// or a field the model cannot do without is absent.
AibomDocument parse_document(std::string_view text);
AibomDocument document_from_json(const Json& root);

Json to_json(const ComponentRecord& component);
Json to_json(const AibomDocument& doc, bool include_signature = true);

/// Sorted keys, no insignificant whitespace, minimal escaping, signature
/// block excluded. This is the byte string that gets signed and MACed.
std::string serialize_canonical(const AibomDocument& doc);
/// Indented, signature included; for writing documents to disk.
std::string serialize_pretty(const AibomDocument& doc);

/// Throws AmbiguityError when a field appears twice with different values.
SacroExtensions extract_sacro_properties(const ComponentRecord& component);

/// All components in `doc.components`, nested ones included, pre-order.
std::vector<const ComponentRecord*> flatten_components(const AibomDocument& doc);

}  // namespace aibom

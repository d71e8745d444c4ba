#pragma once

// Rule-based validation of AIBOM JSON against the SACRO subset of
// CycloneDX 1.5. Unlike a first-failure schema check, every violation in
// the document is reported.

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "aibom/model.hpp"

namespace aibom {

inline constexpr std::string_view kRuleSetVersion = "sacro-aibom-rules/1.0";

namespace rule {
inline constexpr std::string_view kJsonSyntax = "json-syntax";
inline constexpr std::string_view kType = "type";
inline constexpr std::string_view kRequiredField = "required-field";
inline constexpr std::string_view kEnum = "enum";
inline constexpr std::string_view kPattern = "pattern";
inline constexpr std::string_view kMinimum = "minimum";
inline constexpr std::string_view kMinItems = "min-items";
inline constexpr std::string_view kHashFormat = "hash-format";
inline constexpr std::string_view kHashMissing = "hash-missing";
inline constexpr std::string_view kTimestampFormat = "timestamp-format";
inline constexpr std::string_view kComponentType = "component-type";
inline constexpr std::string_view kModelProperties = "model-properties";
inline constexpr std::string_view kVocabulary = "vocabulary";
inline constexpr std::string_view kDigestFormat = "digest-format";
inline constexpr std::string_view kExtensionPrefix = "extension-prefix";
inline constexpr std::string_view kUrlFormat = "url-format";
inline constexpr std::string_view kSignatureAlg = "signature-alg";
inline constexpr std::string_view kBase64 = "base64";
}  // namespace rule

struct RuleInfo {
  std::string_view id;
  /// "structural" for schema-shape rules, "semantic" for content rules.
  std::string_view category;
  std::string_view description;
};

/// The registered rule set, in rule-id order.
const std::vector<RuleInfo>& rule_set();

struct Violation {
  std::string path;  ///< JSON pointer; "" is the document root
  std::string rule;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  bool valid = true;
  std::vector<Violation> violations;
  std::string rule_set_version{kRuleSetVersion};

  bool has_rule(std::string_view rule_id) const;
  bool has_path(std::string_view path) const;
};

struct ValidationOptions {
  /// Require the "x-sacrospec-" prefix on extension properties.
  bool strict = false;
  /// Registry additions to the disclosure-control vocabulary.
  std::set<std::string, std::less<>> extra_vocabulary;
};

/// Malformed JSON is reported as a single json-syntax violation.
ValidationReport validate_structure(std::string_view json, const ValidationOptions& options = {});
ValidationReport validate_json(const Json& root, const ValidationOptions& options = {});
/// Throws IoError for a missing, unreadable, or non-regular path.
ValidationReport validate_file(const std::filesystem::path& path,
                               const ValidationOptions& options = {});

Json to_json(const ValidationReport& report);

}  // namespace aibom

#pragma once

// Package URL and CPE 2.3 identifiers for inventoried dependencies.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "aibom/inspector.hpp"

namespace aibom {

struct Purl {
  std::string type;  ///< pypi, conda, deb, generic
  std::optional<std::string> namespace_;
  std::string name;
  std::string version;

  /// "pkg:<type>/[<namespace>/]<name>@<version>", percent-encoded.
  std::string render() const;
  /// Qualifiers and subpath are accepted and dropped. nullopt on malformed input.
  static std::optional<Purl> parse(std::string_view text);
  friend bool operator==(const Purl&, const Purl&) = default;
};

/// Maps a PURL type back to the ecosystem token used in affected ranges.
std::string purl_type_ecosystem(std::string_view purl_type);

/// Throws DomainError when the declaration carries no version.
Purl to_purl(const DependencyDecl& dep);

struct CpeId {
  std::string part = "a";
  std::string vendor;
  std::string product;
  std::string version;

  /// "cpe:2.3:a:<vendor>:<product>:<version>:*:*:*:*:*:*:*"
  std::string render() const;
  static std::optional<CpeId> parse(std::string_view text);
  /// "vendor:product", the matching key for CPE-based ranges.
  std::string product_key() const { return vendor + ":" + product; }
  friend bool operator==(const CpeId&, const CpeId&) = default;
};

/// (ecosystem, package) -> (vendor, product).
class CpeAliasTable {
 public:
  /// Aliases shipped with the toolkit for common ML and system packages.
  static const CpeAliasTable& bundled();
  /// {"pypi/tensorflow": ["google", "tensorflow"], ...}
  static CpeAliasTable from_json(const nlohmann::json& j);

  void add(Ecosystem ecosystem, std::string_view package, std::string vendor, std::string product);
  std::optional<std::pair<std::string, std::string>> lookup(Ecosystem ecosystem,
                                                             std::string_view package) const;
  /// Entries from `other` override entries here.
  void merge(const CpeAliasTable& other);
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::pair<std::string, std::string>, std::less<>> entries_;
};

/// nullopt when the package has no alias or no version.
std::optional<CpeId> to_cpe(const DependencyDecl& dep,
                            const CpeAliasTable& aliases = CpeAliasTable::bundled());

}  // namespace aibom

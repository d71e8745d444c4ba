#pragma once

// Semantic-version ordering and affected-version constraints. Versions
// that are not semantic versions are compared by exact string equality only.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aibom {

/// MAJOR.MINOR.PATCH[-PRERELEASE][+BUILD], per semver 2.0.0.
struct SemVer {
  std::uint64_t major = 0;
  std::uint64_t minor = 0;
  std::uint64_t patch = 0;
  std::vector<std::string> prerelease;

  static std::optional<SemVer> parse(std::string_view text);
  /// Precedence order; build metadata is ignored.
  friend std::strong_ordering operator<=>(const SemVer& a, const SemVer& b);
  friend bool operator==(const SemVer& a, const SemVer& b) { return (a <=> b) == 0; }
};

struct VersionInterval {
  std::optional<std::string> lower;  ///< absent: unbounded below
  bool lower_inclusive = true;
  std::optional<std::string> upper;  ///< absent: unbounded above
  bool upper_inclusive = false;
  friend bool operator==(const VersionInterval&, const VersionInterval&) = default;
};

class VersionConstraint {
 public:
  VersionConstraint() = default;

  /// Textual form: alternatives separated by "||"; each alternative is
  /// either an exact version ("==1.2.3", "=1.2.3", "1.2.3"), "*", or
  /// comparators (">=1.22.0 <1.22.2"). Throws DomainError on bad syntax.
  static VersionConstraint parse(std::string_view text);
  static VersionConstraint any();

  void add_interval(VersionInterval interval) { intervals_.push_back(std::move(interval)); }
  void add_exact(std::string version) { exact_.push_back(std::move(version)); }

  /// Exact entries match by string equality. Intervals apply only when the
  /// version and the bounds all parse as semantic versions and
  /// `semver_ordering` is enabled; otherwise they never match.
  bool contains(std::string_view version, bool semver_ordering = true) const;

  std::string render() const;
  bool empty() const { return intervals_.empty() && exact_.empty(); }
  const std::vector<VersionInterval>& intervals() const { return intervals_; }
  const std::vector<std::string>& exact() const { return exact_; }
  friend bool operator==(const VersionConstraint&, const VersionConstraint&) = default;

 private:
  std::vector<VersionInterval> intervals_;
  std::vector<std::string> exact_;
};

}  // namespace aibom

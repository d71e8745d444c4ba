#include "aibom/version_range.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "aibom/errors.hpp"

namespace aibom {
namespace {

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

std::optional<std::uint64_t> numeric(std::string_view s) {
  if (!all_digits(s) || (s.size() > 1 && s[0] == '0')) return std::nullopt;
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool valid_identifier(std::string_view id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-';
  });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// OSV and NVD use "0" for "every version since the beginning".
bool is_origin(const std::optional<std::string>& bound) { return bound && *bound == "0"; }

}  // namespace

std::optional<SemVer> SemVer::parse(std::string_view text) {
  if (auto plus = text.find('+'); plus != std::string_view::npos) {
    const auto build = text.substr(plus + 1);
    for (auto id : split(build, '.'))
      if (!valid_identifier(id)) return std::nullopt;
    text = text.substr(0, plus);
  }
  std::string_view pre;
  if (auto dash = text.find('-'); dash != std::string_view::npos) {
    pre = text.substr(dash + 1);
    text = text.substr(0, dash);
    if (pre.empty()) return std::nullopt;
  }
  const auto core = split(text, '.');
  if (core.size() != 3) return std::nullopt;
  SemVer v;
  auto ma = numeric(core[0]), mi = numeric(core[1]), pa = numeric(core[2]);
  if (!ma || !mi || !pa) return std::nullopt;
  v.major = *ma;
  v.minor = *mi;
  v.patch = *pa;
  if (!pre.empty()) {
    for (auto id : split(pre, '.')) {
      if (!valid_identifier(id)) return std::nullopt;
      if (all_digits(id) && id.size() > 1 && id[0] == '0') return std::nullopt;
      v.prerelease.emplace_back(id);
    }
  }
  return v;
}

std::strong_ordering operator<=>(const SemVer& a, const SemVer& b) {
  if (auto c = a.major <=> b.major; c != 0) return c;
  if (auto c = a.minor <=> b.minor; c != 0) return c;
  if (auto c = a.patch <=> b.patch; c != 0) return c;
  // A release outranks any of its pre-releases.
  if (a.prerelease.empty() || b.prerelease.empty())
    return a.prerelease.empty() <=> b.prerelease.empty();
  const std::size_t n = std::min(a.prerelease.size(), b.prerelease.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& x = a.prerelease[i];
    const auto& y = b.prerelease[i];
    const bool xn = all_digits(x), yn = all_digits(y);
    if (xn && yn) {
      if (x.size() != y.size()) return x.size() <=> y.size();
      if (auto c = x.compare(y); c != 0) return c <=> 0;
    } else if (xn != yn) {
      return xn ? std::strong_ordering::less : std::strong_ordering::greater;
    } else if (auto c = x.compare(y); c != 0) {
      return c <=> 0;
    }
  }
  return a.prerelease.size() <=> b.prerelease.size();
}

VersionConstraint VersionConstraint::any() {
  VersionConstraint c;
  c.add_interval({});
  return c;
}

VersionConstraint VersionConstraint::parse(std::string_view text) {
  VersionConstraint c;
  if (trim(text).empty()) throw DomainError("empty version constraint");
  std::size_t start = 0;
  while (true) {
    const auto bar = text.find("||", start);
    std::string alt(trim(text.substr(start, bar == std::string_view::npos ? text.npos : bar - start)));
    std::replace(alt.begin(), alt.end(), ',', ' ');
    if (alt.empty()) throw DomainError("empty alternative in version constraint");

    std::vector<std::string> tokens;
    {
      std::string_view rest = alt;
      while (!(rest = trim(rest)).empty()) {
        // An operator may be separated from its operand by spaces (">= 1.0").
        std::size_t op_len = 0;
        while (op_len < rest.size() && std::string_view("<>=!").find(rest[op_len]) != std::string_view::npos)
          ++op_len;
        std::string tok(rest.substr(0, op_len));
        rest = trim(rest.substr(op_len));
        const auto end = rest.find_first_of(" \t");
        tok += rest.substr(0, end);
        rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
        tokens.push_back(std::move(tok));
      }
    }

    if (tokens.size() == 1 && tokens[0] == "*") {
      c.add_interval({});
    } else if (tokens.size() == 1 && tokens[0].find_first_of("<>") == std::string::npos) {
      std::string_view v = tokens[0];
      if (v.starts_with("==")) v.remove_prefix(2);
      else if (v.starts_with("=")) v.remove_prefix(1);
      if (v.empty() || v.find_first_of("=!") != std::string_view::npos)
        throw DomainError("bad exact version in constraint: " + tokens[0]);
      c.add_exact(std::string(v));
    } else {
      VersionInterval iv;
      for (const auto& tok : tokens) {
        std::string_view t = tok;
        bool lower = false, inclusive = false;
        if (t.starts_with(">=")) lower = true, inclusive = true, t.remove_prefix(2);
        else if (t.starts_with("<=")) inclusive = true, t.remove_prefix(2);
        else if (t.starts_with(">")) lower = true, t.remove_prefix(1);
        else if (t.starts_with("<")) t.remove_prefix(1);
        else throw DomainError("unsupported comparator in constraint: " + tok);
        if (t.empty() || t.find_first_of("<>=!") != std::string_view::npos)
          throw DomainError("bad comparator operand: " + tok);
        auto& slot = lower ? iv.lower : iv.upper;
        if (slot) throw DomainError("duplicate bound in constraint: " + alt);
        slot = std::string(t);
        (lower ? iv.lower_inclusive : iv.upper_inclusive) = inclusive;
      }
      c.add_interval(std::move(iv));
    }

    if (bar == std::string_view::npos) break;
    start = bar + 2;
  }
  return c;
}

bool VersionConstraint::contains(std::string_view version, bool semver_ordering) const {
  if (std::find(exact_.begin(), exact_.end(), version) != exact_.end()) return true;
  if (!semver_ordering || intervals_.empty()) return false;
  const auto v = SemVer::parse(version);
  if (!v) return false;
  for (const auto& iv : intervals_) {
    bool ok = true;
    if (iv.lower && !is_origin(iv.lower)) {
      const auto lo = SemVer::parse(*iv.lower);
      if (!lo) continue;
      ok = iv.lower_inclusive ? *v >= *lo : *v > *lo;
    }
    if (ok && iv.upper) {
      const auto hi = SemVer::parse(*iv.upper);
      if (!hi) continue;
      ok = iv.upper_inclusive ? *v <= *hi : *v < *hi;
    }
    if (ok) return true;
  }
  return false;
}

std::string VersionConstraint::render() const {
  std::vector<std::string> parts;
  for (const auto& iv : intervals_) {
    std::string s;
    if (iv.lower) s += (iv.lower_inclusive ? ">=" : ">") + *iv.lower;
    if (iv.upper) s += (s.empty() ? "" : " ") + std::string(iv.upper_inclusive ? "<=" : "<") + *iv.upper;
    parts.push_back(s.empty() ? "*" : s);
  }
  for (const auto& e : exact_) parts.push_back("==" + e);
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : " || ") + p;
  return out;
}

}  // namespace aibom

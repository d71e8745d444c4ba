#include "aibom/cvss.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <string>

#include "aibom/errors.hpp"

namespace aibom {
namespace {

// Rounds up to one decimal without floating-point drift (CVSS v3.1 Appendix A).
double round_up(double x) {
  const auto scaled = static_cast<long long>(std::llround(x * 100000.0));
  if (scaled % 10000 == 0) return static_cast<double>(scaled) / 100000.0;
  return (std::floor(static_cast<double>(scaled) / 10000.0) + 1.0) / 10.0;
}

}  // namespace

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::kCritical: return "critical";
    case Severity::kHigh: return "high";
    case Severity::kMedium: return "medium";
    case Severity::kLow: return "low";
    case Severity::kUnscored: return "unscored";
  }
  return "unscored";
}

Severity classify_severity(std::optional<double> score) {
  if (!score) return Severity::kUnscored;
  const double s = *score;
  if (!(s >= 0.0 && s <= 10.0)) throw DomainError("CVSS score outside [0, 10]: " + std::to_string(s));
  if (s > 8.9) return Severity::kCritical;
  if (s >= 7.0) return Severity::kHigh;
  if (s >= 4.0) return Severity::kMedium;
  return Severity::kLow;
}

std::optional<double> cvss3_base_score(std::string_view vector) {
  if (!vector.starts_with("CVSS:3.0/") && !vector.starts_with("CVSS:3.1/")) return std::nullopt;
  vector.remove_prefix(9);
  std::map<std::string, std::string, std::less<>> m;
  while (!vector.empty()) {
    const auto slash = vector.find('/');
    const auto part = vector.substr(0, slash);
    const auto colon = part.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    if (!m.emplace(std::string(part.substr(0, colon)), std::string(part.substr(colon + 1))).second)
      return std::nullopt;
    vector = slash == std::string_view::npos ? std::string_view{} : vector.substr(slash + 1);
  }
  for (auto key : {"AV", "AC", "PR", "UI", "S", "C", "I", "A"})
    if (!m.contains(key)) return std::nullopt;

  const std::string& scope = m["S"];
  if (scope != "U" && scope != "C") return std::nullopt;
  const bool changed = scope == "C";

  const std::map<std::string, double, std::less<>> av = {{"N", 0.85}, {"A", 0.62}, {"L", 0.55}, {"P", 0.2}};
  const std::map<std::string, double, std::less<>> ac = {{"L", 0.77}, {"H", 0.44}};
  const std::map<std::string, double, std::less<>> pr = {
      {"N", 0.85}, {"L", changed ? 0.68 : 0.62}, {"H", changed ? 0.5 : 0.27}};
  const std::map<std::string, double, std::less<>> ui = {{"N", 0.85}, {"R", 0.62}};
  const std::map<std::string, double, std::less<>> cia = {{"H", 0.56}, {"L", 0.22}, {"N", 0.0}};

  auto get = [&](const auto& table, const char* key) -> std::optional<double> {
    auto it = table.find(m[key]);
    if (it == table.end()) return std::nullopt;
    return it->second;
  };
  auto vav = get(av, "AV"), vac = get(ac, "AC"), vpr = get(pr, "PR"), vui = get(ui, "UI");
  auto vc = get(cia, "C"), vi = get(cia, "I"), va = get(cia, "A");
  if (!vav || !vac || !vpr || !vui || !vc || !vi || !va) return std::nullopt;

  const double iss = 1.0 - (1.0 - *vc) * (1.0 - *vi) * (1.0 - *va);
  const double impact =
      changed ? 7.52 * (iss - 0.029) - 3.25 * std::pow(iss - 0.02, 15) : 6.42 * iss;
  const double exploitability = 8.22 * *vav * *vac * *vpr * *vui;
  if (impact <= 0) return 0.0;
  const double raw = changed ? std::min(1.08 * (impact + exploitability), 10.0)
                             : std::min(impact + exploitability, 10.0);
  return round_up(raw);
}

std::optional<double> parse_cvss_score(std::string_view text) {
  if (text.starts_with("CVSS:3")) return cvss3_base_score(text);
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !(v >= 0.0 && v <= 10.0))
    return std::nullopt;
  return v;
}

}  // namespace aibom

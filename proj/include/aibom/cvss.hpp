#pragma once

#include <optional>
#include <string_view>

namespace aibom {

enum class Severity { kCritical, kHigh, kMedium, kLow, kUnscored };

std::string_view to_string(Severity s);

/// > 8.9 critical, 7.0-8.9 high, 4.0-6.9 medium, below 4.0 low, absent
/// unscored. Throws DomainError for scores outside [0, 10].
Severity classify_severity(std::optional<double> score);

/// CVSS v3.0/v3.1 base score from a vector string such as
/// "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H". nullopt if malformed.
std::optional<double> cvss3_base_score(std::string_view vector);

/// A bare decimal ("7.5") or a v3 vector; nullopt for anything else.
std::optional<double> parse_cvss_score(std::string_view text);

}  // namespace aibom

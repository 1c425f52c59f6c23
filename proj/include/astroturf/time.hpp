#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace astroturf {

/// Seconds since the Unix epoch, UTC. Streams carry second resolution, so a
/// plain integer count is exact and totally ordered.
using UtcSeconds = std::int64_t;

constexpr std::int64_t kSecondsPerMinute = 60;
constexpr std::int64_t kSecondsPerDay = 86400;

struct CivilDate {
    int year;
    int month; // 1..12
    int day;   // 1..31
};

// Days-from-civil / civil-from-days (Howard Hinnant's algorithms), valid for
// the whole proleptic Gregorian calendar.
constexpr std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (static_cast<unsigned>(m) + (m > 2 ? -3 : 9)) + 2) / 5 + static_cast<unsigned>(d) - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

constexpr UtcSeconds utc_from_civil(int y, int mo, int d, int h = 0, int mi = 0, int s = 0) {
    return days_from_civil(y, mo, d) * kSecondsPerDay + h * 3600 + mi * 60 + s;
}

/// Parses "YYYY-MM-DDTHH:MM:SSZ". Returns nullopt on any deviation; callers
/// attach their own line/row context.
inline std::optional<UtcSeconds> parse_iso8601(std::string_view s) {
    if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' ||
        s[13] != ':' || s[16] != ':' || s[19] != 'Z') {
        return std::nullopt;
    }
    auto num = [&](int pos, int len, int& out) -> bool {
        out = 0;
        for (int i = pos; i < pos + len; ++i) {
            if (s[static_cast<size_t>(i)] < '0' || s[static_cast<size_t>(i)] > '9') return false;
            out = out * 10 + (s[static_cast<size_t>(i)] - '0');
        }
        return true;
    };
    int y, mo, d, h, mi, sec;
    if (!num(0, 4, y) || !num(5, 2, mo) || !num(8, 2, d) ||
        !num(11, 2, h) || !num(14, 2, mi) || !num(17, 2, sec)) {
        return std::nullopt;
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec > 59) return std::nullopt;
    return utc_from_civil(y, mo, d, h, mi, sec);
}

inline std::string format_iso8601(UtcSeconds t) {
    std::int64_t days = t / kSecondsPerDay;
    std::int64_t rem = t % kSecondsPerDay;
    if (rem < 0) {
        rem += kSecondsPerDay;
        days -= 1;
    }
    CivilDate cd = civil_from_days(days);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", cd.year, cd.month, cd.day,
                  static_cast<int>(rem / 3600), static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
    return buf;
}

inline UtcSeconds truncate_to_minute(UtcSeconds t) {
    std::int64_t m = t / kSecondsPerMinute;
    if (t < 0 && t % kSecondsPerMinute != 0) m -= 1;
    return m * kSecondsPerMinute;
}

inline CivilDate civil_of(UtcSeconds t) {
    std::int64_t days = t / kSecondsPerDay;
    if (t < 0 && t % kSecondsPerDay != 0) days -= 1;
    return civil_from_days(days);
}

/// "YYYY-MM-DD" day key.
inline std::string day_key(UtcSeconds t) {
    CivilDate cd = civil_of(t);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", cd.year, cd.month, cd.day);
    return buf;
}

/// "YYYY-MM" month key.
inline std::string month_key(UtcSeconds t) {
    CivilDate cd = civil_of(t);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", cd.year, cd.month);
    return buf;
}

/// "YYYYQn" calendar-quarter key.
inline std::string quarter_key(UtcSeconds t) {
    CivilDate cd = civil_of(t);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04dQ%d", cd.year, (cd.month - 1) / 3 + 1);
    return buf;
}

/// Month ordinal (year*12 + month), the unit of calendar-month arithmetic.
inline std::int64_t month_index(UtcSeconds t) {
    CivilDate cd = civil_of(t);
    return static_cast<std::int64_t>(cd.year) * 12 + (cd.month - 1);
}

/// Calendar months from `earlier` to `later` (difference of month keys).
inline std::int64_t months_between(UtcSeconds earlier, UtcSeconds later) {
    return month_index(later) - month_index(earlier);
}

} // namespace astroturf

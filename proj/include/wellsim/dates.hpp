#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace wellsim {

/// Calendar day, stored as days since 1970-01-01 so day arithmetic is exact.
struct CivilDate {
    std::int64_t days_since_epoch = 0;

    CivilDate() = default;
    explicit CivilDate(std::int64_t days) : days_since_epoch(days) {}

    CivilDate plus_days(std::int64_t n) const { return CivilDate{days_since_epoch + n}; }

    bool operator==(const CivilDate&) const = default;

    // Howard Hinnant's civil-from-days / days-from-civil algorithms.
    static CivilDate from_ymd(int y, unsigned m, unsigned d) {
        if (m < 1 || m > 12 || d < 1 || d > 31)
            throw std::invalid_argument("CivilDate: month/day out of range");
        y -= m <= 2;
        const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
        const unsigned yoe = static_cast<unsigned>(y - era * 400);
        const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
        const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return CivilDate{era * 146097 + static_cast<std::int64_t>(doe) - 719468};
    }

    void to_ymd(int& y, unsigned& m, unsigned& d) const {
        std::int64_t z = days_since_epoch + 719468;
        const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
        const unsigned doe = static_cast<unsigned>(z - era * 146097);
        const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
        const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const unsigned mp = (5 * doy + 2) / 153;
        d = doy - (153 * mp + 2) / 5 + 1;
        m = mp + (mp < 10 ? 3 : -9);
        y = static_cast<int>(yy + (m <= 2));
    }

    std::string to_iso() const {
        int y;
        unsigned m, d;
        to_ymd(y, m, d);
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
        return buf;
    }

    static CivilDate parse_iso(const std::string& s) {
        int y = 0;
        unsigned m = 0, d = 0;
        if (std::sscanf(s.c_str(), "%d-%u-%u", &y, &m, &d) != 3)
            throw std::invalid_argument("CivilDate: expected YYYY-MM-DD, got '" + s + "'");
        return from_ymd(y, m, d);
    }
};

}  // namespace wellsim

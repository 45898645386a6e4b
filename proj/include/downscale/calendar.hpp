#pragma once

#include <array>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace downscale {

struct Date {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31

    friend bool operator==(const Date& a, const Date& b) {
        return a.year == b.year && a.month == b.month && a.day == b.day;
    }
    friend auto operator<=>(const Date& a, const Date& b) = default;
};

inline bool is_leap_year(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

inline int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> len = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap_year(y)) return 29;
    return len[m - 1];
}

// days since 1970-01-01 (Howard Hinnant's civil-date algorithm)
inline long to_serial(const Date& d) {
    int y = d.year;
    const int m = d.month;
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d.day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

inline Date from_serial(long z) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long y = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

inline Date add_days(const Date& d, long n) { return from_serial(to_serial(d) + n); }

inline void validate_date(const Date& d) {
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month))
        throw std::invalid_argument("invalid calendar date");
}

// Day-of-year slot in a fixed 366-slot calendar: Jan 1 = 1, Feb 29 = 60,
// Dec 31 = 366. Non-leap years skip slot 60 so the same calendar day lands
// in the same slot every year.
inline int day_of_year_366(const Date& d) {
    // leap-year cumulative month offsets; non-leap years simply never
    // produce slot 60
    static constexpr std::array<int, 12> cum = {0, 31, 60, 91, 121, 152, 182, 213, 244, 274, 305, 335};
    return cum[d.month - 1] + d.day;
}

constexpr int kDoySlots = 366;

// shortest distance on the 366-slot circle
inline int cyclic_doy_distance(int a, int b) {
    int diff = a - b;
    if (diff < 0) diff = -diff;
    return diff <= kDoySlots - diff ? diff : kDoySlots - diff;
}

inline std::string to_iso(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

inline Date parse_iso(const std::string& s) {
    Date d;
    if (std::sscanf(s.c_str(), "%d-%d-%d", &d.year, &d.month, &d.day) != 3)
        throw std::invalid_argument("cannot parse date '" + s + "' (expected YYYY-MM-DD)");
    validate_date(d);
    return d;
}

enum class Season { DJF = 0, MAM = 1, JJA = 2, SON = 3 };

inline Season season_of_month(int month) {
    if (month == 12 || month <= 2) return Season::DJF;
    if (month <= 5) return Season::MAM;
    if (month <= 8) return Season::JJA;
    return Season::SON;
}

inline const char* season_name(Season s) {
    switch (s) {
        case Season::DJF: return "DJF";
        case Season::MAM: return "MAM";
        case Season::JJA: return "JJA";
        default: return "SON";
    }
}

inline Season season_from_name(const std::string& name) {
    for (int i = 0; i < 4; ++i)
        if (name == season_name(static_cast<Season>(i))) return static_cast<Season>(i);
    throw std::invalid_argument("unknown season '" + name + "'");
}

constexpr std::array<Season, 4> kAllSeasons = {Season::DJF, Season::MAM, Season::JJA, Season::SON};

struct SeasonMask {
    Season label = Season::DJF;
    std::vector<char> mask;  // one flag per time index

    std::size_t count() const {
        std::size_t n = 0;
        for (char c : mask) n += (c != 0);
        return n;
    }
};

// month-based split; the four masks partition the time axis
inline std::array<SeasonMask, 4> season_split(const Date& start, std::size_t ndays) {
    std::array<SeasonMask, 4> out;
    for (int s = 0; s < 4; ++s) {
        out[s].label = static_cast<Season>(s);
        out[s].mask.assign(ndays, 0);
    }
    long serial = to_serial(start);
    for (std::size_t t = 0; t < ndays; ++t) {
        const Date d = from_serial(serial + static_cast<long>(t));
        out[static_cast<int>(season_of_month(d.month))].mask[t] = 1;
    }
    return out;
}

}  // namespace downscale

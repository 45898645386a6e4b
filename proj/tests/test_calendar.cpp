#include <catch2/catch_amalgamated.hpp>

#include "downscale/calendar.hpp"

using namespace downscale;

TEST_CASE("serial day round trip") {
    const Date d{2001, 3, 17};
    REQUIRE(from_serial(to_serial(d)) == d);
    REQUIRE(to_serial(Date{1970, 1, 1}) == 0);
    REQUIRE(add_days(Date{1999, 12, 31}, 1) == Date{2000, 1, 1});
    REQUIRE(add_days(Date{2000, 2, 28}, 1) == Date{2000, 2, 29});
    REQUIRE(add_days(Date{1900, 2, 28}, 1) == Date{1900, 3, 1});  // 1900 is not a leap year
}

TEST_CASE("366-slot day of year") {
    REQUIRE(day_of_year_366(Date{2001, 1, 1}) == 1);
    REQUIRE(day_of_year_366(Date{2000, 2, 29}) == 60);
    // Mar 1 lands in slot 61 in leap and non-leap years alike
    REQUIRE(day_of_year_366(Date{2000, 3, 1}) == 61);
    REQUIRE(day_of_year_366(Date{2001, 3, 1}) == 61);
    REQUIRE(day_of_year_366(Date{2001, 12, 31}) == 366);
    REQUIRE(day_of_year_366(Date{2000, 12, 31}) == 366);
}

TEST_CASE("cyclic day-of-year distance") {
    REQUIRE(cyclic_doy_distance(1, 366) == 1);
    REQUIRE(cyclic_doy_distance(1, 352) == 15);
    REQUIRE(cyclic_doy_distance(183, 183) == 0);
    REQUIRE(cyclic_doy_distance(1, 184) == 183);
}

TEST_CASE("iso parsing") {
    REQUIRE(parse_iso("1995-01-01") == Date{1995, 1, 1});
    REQUIRE(to_iso(Date{2004, 12, 9}) == "2004-12-09");
    REQUIRE_THROWS(parse_iso("not-a-date"));
    REQUIRE_THROWS(parse_iso("2001-02-30"));
}

TEST_CASE("season assignment") {
    REQUIRE(season_of_month(1) == Season::DJF);   // Jan 15 -> DJF
    REQUIRE(season_of_month(7) == Season::JJA);   // Jul 1 -> JJA
    REQUIRE(season_of_month(12) == Season::DJF);
    REQUIRE(season_of_month(9) == Season::SON);
}

TEST_CASE("season masks partition the time axis") {
    // spans a leap year and odd boundaries
    const Date start{1999, 11, 17};
    const std::size_t ndays = 900;
    const auto masks = season_split(start, ndays);
    std::size_t total = 0;
    for (const auto& m : masks) {
        REQUIRE(m.mask.size() == ndays);
        total += m.count();
    }
    REQUIRE(total == ndays);
    for (std::size_t t = 0; t < ndays; ++t) {
        int hits = 0;
        for (const auto& m : masks) hits += m.mask[t];
        REQUIRE(hits == 1);
    }
}

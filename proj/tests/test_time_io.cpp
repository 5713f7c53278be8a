#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"

#include "dynreserve/csv_io.hpp"
#include "dynreserve/time_grid.hpp"

using namespace dynreserve;

TEST_CASE("timestamps parse and format") {
    const auto ts = parse_timestamp("2020-07-01T13:45:00");
    CHECK(format_timestamp(ts) == "2020-07-01T13:45:00");
    CHECK(format_timestamp(parse_timestamp("2020-07-01 13:45")) == "2020-07-01T13:45:00");
    CHECK(format_timestamp(parse_timestamp("2020-07-01T13:45:00Z")) == "2020-07-01T13:45:00");
    CHECK(hour_of_day(ts) == doctest::Approx(13.75));
    CHECK_THROWS_AS(parse_timestamp("2020-02-30T00:00"), std::invalid_argument);
    CHECK_THROWS_AS(parse_timestamp("yesterday"), std::invalid_argument);
}

TEST_CASE("grid from timestamps") {
    std::vector<Timestamp> ts{parse_timestamp("2020-07-01T00:00"), parse_timestamp("2020-07-01T00:15"),
                              parse_timestamp("2020-07-01T00:30")};
    const auto g = grid_from_timestamps(ts);
    CHECK(g.resolution == std::chrono::minutes{15});
    CHECK(g.size == 3);
    CHECK(g.at(2) == ts[2]);
    ts[2] = parse_timestamp("2020-07-01T00:40");
    CHECK_THROWS_AS(grid_from_timestamps(ts), std::invalid_argument);
}

TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-12, 12345.678, 1e300, std::numeric_limits<double>::denorm_min()}) {
        CHECK(parse_number(format_number(v)) == v);
    }
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(3.0) == "3");
    CHECK_THROWS_AS(parse_number("1.5x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_number(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_number("nan"), std::invalid_argument);
}

TEST_CASE("level column names") {
    CHECK(level_column(0.05) == "p05");
    CHECK(level_column(0.5) == "p50");
    CHECK(level_column(0.025) == "p02.5");
    CHECK(level_column(0.975) == "p97.5");
}

#include "dynreserve/time_grid.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace dynreserve {

namespace {

int parse_field(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
    int value = 0;
    if (pos + len > text.size()) {
        throw std::invalid_argument("bad timestamp '" + std::string(whole) + "'");
    }
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
    if (ec != std::errc{} || ptr != text.data() + pos + len) {
        throw std::invalid_argument("bad timestamp '" + std::string(whole) + "'");
    }
    return value;
}

void expect(std::string_view text, std::size_t pos, std::string_view allowed, std::string_view whole) {
    if (pos >= text.size() || allowed.find(text[pos]) == std::string_view::npos) {
        throw std::invalid_argument("bad timestamp '" + std::string(whole) + "'");
    }
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    std::string_view s = text;
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    if (!s.empty() && s.back() == 'Z') s.remove_suffix(1);

    const int y = parse_field(s, 0, 4, text);
    expect(s, 4, "-", text);
    const int mo = parse_field(s, 5, 2, text);
    expect(s, 7, "-", text);
    const int d = parse_field(s, 8, 2, text);
    int hh = 0, mm = 0, ss = 0;
    if (s.size() > 10) {
        expect(s, 10, "T ", text);
        hh = parse_field(s, 11, 2, text);
        expect(s, 13, ":", text);
        mm = parse_field(s, 14, 2, text);
        if (s.size() > 16) {
            expect(s, 16, ":", text);
            ss = parse_field(s, 17, 2, text);
            if (s.size() != 19) {
                throw std::invalid_argument("bad timestamp '" + std::string(text) + "'");
            }
        }
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) {
        throw std::invalid_argument("bad timestamp '" + std::string(text) + "'");
    }
    return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
}

std::string format_timestamp(Timestamp ts) {
    using namespace std::chrono;
    const auto day_point = floor<days>(ts);
    const year_month_day ymd{day_point};
    const hh_mm_ss tod{ts - day_point};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ld", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                  static_cast<long>(tod.seconds().count()));
    return buf;
}

double hour_of_day(Timestamp ts) {
    using namespace std::chrono;
    const auto since_midnight = ts - floor<days>(ts);
    return static_cast<double>(since_midnight.count()) / 3600.0;
}

std::vector<Timestamp> TimeGrid::timestamps() const {
    std::vector<Timestamp> out;
    out.reserve(size);
    for (std::size_t i = 0; i < size; ++i) out.push_back(at(i));
    return out;
}

TimeGrid grid_from_timestamps(const std::vector<Timestamp>& ts, std::chrono::minutes fallback) {
    using namespace std::chrono;
    if (ts.empty()) {
        throw std::invalid_argument("cannot build a time grid from zero timestamps");
    }
    TimeGrid grid{ts.front(), fallback, ts.size()};
    if (ts.size() == 1) return grid;
    const auto step = ts[1] - ts[0];
    if (step <= seconds{0} || step % minutes{1} != seconds{0}) {
        throw std::invalid_argument("timestamps must increase in whole minutes, got step at " +
                                    format_timestamp(ts[1]));
    }
    grid.resolution = duration_cast<minutes>(step);
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (ts[i] - ts[i - 1] != step) {
            throw std::invalid_argument("irregular time step at " + format_timestamp(ts[i]));
        }
    }
    return grid;
}

}  // namespace dynreserve

#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dynreserve {

using Timestamp = std::chrono::sys_seconds;

// Accepts "YYYY-MM-DDTHH:MM[:SS][Z]" (a space may replace the 'T').
Timestamp parse_timestamp(std::string_view text);

// Always "YYYY-MM-DDTHH:MM:SS".
std::string format_timestamp(Timestamp ts);

// Fractional hour in [0, 24).
double hour_of_day(Timestamp ts);

// Regular interval grid: start, start + res, ..., start + (size-1)*res.
struct TimeGrid {
    Timestamp start{};
    std::chrono::minutes resolution{60};
    std::size_t size = 0;

    Timestamp at(std::size_t i) const {
        return start + std::chrono::duration_cast<std::chrono::seconds>(resolution) * static_cast<long>(i);
    }
    std::vector<Timestamp> timestamps() const;

    bool operator==(const TimeGrid&) const = default;
};

// Builds a grid from explicit timestamps; throws std::invalid_argument when
// they are not evenly spaced. A single timestamp gets `fallback` resolution.
TimeGrid grid_from_timestamps(const std::vector<Timestamp>& ts,
                              std::chrono::minutes fallback = std::chrono::minutes{60});

}  // namespace dynreserve

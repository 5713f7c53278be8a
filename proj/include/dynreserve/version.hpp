#pragma once

namespace dynreserve {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dynreserve

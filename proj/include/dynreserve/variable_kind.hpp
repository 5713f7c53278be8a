#pragma once

#include <string_view>

namespace dynreserve {

enum class VariableKind { load, wind, solar, net_demand };

std::string_view to_string(VariableKind kind);
VariableKind parse_variable_kind(std::string_view text);

// Wind and solar are production: a positive forecast error (more output than
// forecast) calls for DOWN reserve, the opposite of load and net demand.
constexpr bool is_production(VariableKind kind) {
    return kind == VariableKind::wind || kind == VariableKind::solar;
}

}  // namespace dynreserve

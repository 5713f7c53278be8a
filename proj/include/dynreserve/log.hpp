#pragma once

#include <string>

namespace dynreserve::log {

// Thin wrappers so engine code does not depend on the logging backend.
// Level is read once from DYNRESERVE_LOG_LEVEL (trace|debug|info|warn|error|off).
void warn(const std::string& msg);
void info(const std::string& msg);
void debug(const std::string& msg);

}  // namespace dynreserve::log

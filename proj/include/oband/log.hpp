#pragma once

#include <string>

namespace oband {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

void set_log_level(LogLevel level);
LogLevel log_level();
// Writes "[level] message" to stderr when level is enabled.
void log(LogLevel level, const std::string& message);

}  // namespace oband

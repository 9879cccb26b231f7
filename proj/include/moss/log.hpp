// Diagnostics on stderr, gated by the MOSS_LOG environment variable
// (error | info | debug; default error).
#pragma once

#include <string>

namespace moss {

enum class LogLevel { error = 0, info = 1, debug = 2 };

LogLevel log_level();
bool log_enabled(LogLevel level);
void log_line(LogLevel level, const std::string& message);

}  // namespace moss

#include "moss/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace moss {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("MOSS_LOG");
    if (env == nullptr) return LogLevel::error;
    if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::info;
    return LogLevel::error;
  }();
  return level;
}

bool log_enabled(LogLevel level) {
  return static_cast<int>(level) <= static_cast<int>(log_level());
}

void log_line(LogLevel level, const std::string& message) {
  if (!log_enabled(level)) return;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::fprintf(stderr, "[moss] %s\n", message.c_str());
}

}  // namespace moss

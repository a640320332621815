#include "tomo/log.hpp"

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace tomo {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("LATTICE_TOMO_LOG");
    if (env == nullptr || std::strcmp(env, "off") == 0 || env[0] == '\0') return LogLevel::kOff;
    if (std::strcmp(env, "debug") == 0) return LogLevel::kDebug;
    if (std::strcmp(env, "info") == 0) return LogLevel::kInfo;
    return LogLevel::kOff;
  }();
  return level;
}

bool log_enabled(LogLevel level) {
  return static_cast<int>(level) <= static_cast<int>(log_level());
}

namespace {

void vlog(const char* tag, const char* fmt, va_list args) {
  std::fprintf(stderr, "[%s] ", tag);
  std::vfprintf(stderr, fmt, args);
  std::fputc('\n', stderr);
}

}  // namespace

void log_info(const char* fmt, ...) {
  if (!log_enabled(LogLevel::kInfo)) return;
  va_list args;
  va_start(args, fmt);
  vlog("info", fmt, args);
  va_end(args);
}

void log_debug(const char* fmt, ...) {
  if (!log_enabled(LogLevel::kDebug)) return;
  va_list args;
  va_start(args, fmt);
  vlog("debug", fmt, args);
  va_end(args);
}

}  // namespace tomo

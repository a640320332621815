#pragma once

namespace tomo {

// Diagnostics verbosity, controlled by the LATTICE_TOMO_LOG environment
// variable (off|info|debug). Read once on first use.
enum class LogLevel { kOff = 0, kInfo = 1, kDebug = 2 };

LogLevel log_level();
bool log_enabled(LogLevel level);

void log_info(const char* fmt, ...);
void log_debug(const char* fmt, ...);

}  // namespace tomo

#pragma once

#include <string_view>

namespace ontomatch {

enum class LogLevel { kDebug = 0, kInfo = 1, kWarning = 2, kError = 3, kSilent = 4 };

// Messages below the threshold are dropped. The initial threshold comes from
// ONTOMATCH_LOG (debug|info|warning|error|silent), default warning.
void set_log_level(LogLevel level);
LogLevel log_level();

void log_message(LogLevel level, std::string_view message);
inline void log_info(std::string_view m) { log_message(LogLevel::kInfo, m); }
inline void log_warning(std::string_view m) { log_message(LogLevel::kWarning, m); }

}  // namespace ontomatch

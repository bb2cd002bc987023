#include "ontomatch/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace ontomatch {
namespace {

LogLevel initial_level() {
  const char* env = std::getenv("ONTOMATCH_LOG");
  if (!env) return LogLevel::kWarning;
  const std::string v = env;
  if (v == "debug") return LogLevel::kDebug;
  if (v == "info") return LogLevel::kInfo;
  if (v == "error") return LogLevel::kError;
  if (v == "silent") return LogLevel::kSilent;
  return LogLevel::kWarning;
}

std::atomic<LogLevel>& threshold() {
  static std::atomic<LogLevel> level{initial_level()};
  return level;
}

}  // namespace

void set_log_level(LogLevel level) { threshold().store(level); }
LogLevel log_level() { return threshold().load(); }

void log_message(LogLevel level, std::string_view message) {
  if (level < threshold().load()) return;
  static std::mutex mu;
  static constexpr const char* kNames[] = {"debug", "info", "warning", "error", "silent"};
  std::lock_guard lock(mu);
  std::clog << "[" << kNames[static_cast<int>(level)] << "] " << message << '\n';
}

}  // namespace ontomatch

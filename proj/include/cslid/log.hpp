// cslid/log.hpp -- stderr logging gated by the CSLID_LOG environment variable.
#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace cslid {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

inline LogLevel& log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("CSLID_LOG");
    if (env == nullptr) return LogLevel::info;
    std::string v(env);
    if (v == "quiet") return LogLevel::quiet;
    if (v == "debug") return LogLevel::debug;
    return LogLevel::info;
  }();
  return level;
}

inline void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::info) std::fprintf(stderr, "[cslid] %s\n", msg.c_str());
}

inline void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::debug) std::fprintf(stderr, "[cslid:debug] %s\n", msg.c_str());
}

}  // namespace cslid

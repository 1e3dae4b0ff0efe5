#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace tacsole {

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

// Level comes from the TACSOLE_LOG environment variable (debug|info|warn|error|off),
// default warn. Read once per process.
inline LogLevel log_level()
{
    static LogLevel level = [] {
        const char* env = std::getenv("TACSOLE_LOG");
        if (!env) return LogLevel::Warn;
        if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
        if (std::strcmp(env, "info") == 0) return LogLevel::Info;
        if (std::strcmp(env, "warn") == 0) return LogLevel::Warn;
        if (std::strcmp(env, "error") == 0) return LogLevel::Error;
        if (std::strcmp(env, "off") == 0) return LogLevel::Off;
        return LogLevel::Warn;
    }();
    return level;
}

inline void log_msg(LogLevel lvl, const std::string& msg)
{
    if (lvl < log_level()) return;
    const char* tag = "";
    switch (lvl) {
        case LogLevel::Debug: tag = "debug"; break;
        case LogLevel::Info: tag = "info"; break;
        case LogLevel::Warn: tag = "warn"; break;
        case LogLevel::Error: tag = "error"; break;
        case LogLevel::Off: return;
    }
    std::fprintf(stderr, "[tacsole %s] %s\n", tag, msg.c_str());
}

inline void log_debug(const std::string& msg) { log_msg(LogLevel::Debug, msg); }
inline void log_info(const std::string& msg) { log_msg(LogLevel::Info, msg); }
inline void log_warn(const std::string& msg) { log_msg(LogLevel::Warn, msg); }
inline void log_error(const std::string& msg) { log_msg(LogLevel::Error, msg); }

} // namespace tacsole

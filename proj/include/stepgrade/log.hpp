#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <string>

namespace stepgrade::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

inline const char* level_name(Level level) {
    switch (level) {
        case Level::error: return "error";
        case Level::warn: return "warn";
        case Level::info: return "info";
        case Level::debug: return "debug";
    }
    return "?";
}

inline bool parse_level(const std::string& name, Level& out) {
    if (name == "error") { out = Level::error; return true; }
    if (name == "warn") { out = Level::warn; return true; }
    if (name == "info") { out = Level::info; return true; }
    if (name == "debug") { out = Level::debug; return true; }
    return false;
}

using Sink = std::function<void(Level, const std::string&)>;

namespace detail {

struct State {
    std::mutex mutex;
    Level threshold = Level::info;
    Sink sink; // empty -> stderr
};

inline State& state() {
    static State s;
    return s;
}

} // namespace detail

inline void set_level(Level level) {
    std::lock_guard<std::mutex> lock(detail::state().mutex);
    detail::state().threshold = level;
}

/// Replaces the output sink (tests use this to capture log lines).
/// Passing an empty function restores the default stderr sink.
inline void set_sink(Sink sink) {
    std::lock_guard<std::mutex> lock(detail::state().mutex);
    detail::state().sink = std::move(sink);
}

inline void write(Level level, const std::string& message) {
    auto& s = detail::state();
    std::lock_guard<std::mutex> lock(s.mutex);
    if (static_cast<int>(level) > static_cast<int>(s.threshold)) {
        return;
    }
    if (s.sink) {
        s.sink(level, message);
    } else {
        std::cerr << "[" << level_name(level) << "] " << message << "\n";
    }
}

inline void error(const std::string& message) { write(Level::error, message); }
inline void warn(const std::string& message) { write(Level::warn, message); }
inline void info(const std::string& message) { write(Level::info, message); }
inline void debug(const std::string& message) { write(Level::debug, message); }

} // namespace stepgrade::log

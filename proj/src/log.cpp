#include "vrec/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace vrec::log {

namespace {

Level parse_env() {
    const char* v = std::getenv("VREC_LOG");
    if (!v) return Level::warn;
    if (!std::strcmp(v, "quiet")) return Level::quiet;
    if (!std::strcmp(v, "error")) return Level::error;
    if (!std::strcmp(v, "warn")) return Level::warn;
    if (!std::strcmp(v, "info")) return Level::info;
    if (!std::strcmp(v, "debug")) return Level::debug;
    return Level::warn;
}

Level g_level = parse_env();
bool g_capture = false;
std::vector<std::string> g_captured;

void emit(Level lvl, const char* tag, const std::string& msg) {
    if (static_cast<int>(g_level) >= static_cast<int>(lvl))
        std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

}  // namespace

Level level() { return g_level; }
void set_level(Level lvl) { g_level = lvl; }

void error(const std::string& msg) { emit(Level::error, "error", msg); }

void warn(const std::string& msg) {
    if (g_capture) g_captured.push_back(msg);
    emit(Level::warn, "warn", msg);
}

void info(const std::string& msg) { emit(Level::info, "info", msg); }
void debug(const std::string& msg) { emit(Level::debug, "debug", msg); }

void capture_warnings(bool enable) { g_capture = enable; }
std::vector<std::string> captured_warnings() { return g_captured; }
void clear_captured_warnings() { g_captured.clear(); }

}  // namespace vrec::log

#pragma once

#include <string>
#include <vector>

namespace vrec::log {

enum class Level { quiet = 0, error = 1, warn = 2, info = 3, debug = 4 };

/// Current verbosity. Initialized from the VREC_LOG environment variable
/// (quiet|error|warn|info|debug), default warn.
Level level();
void set_level(Level lvl);

void error(const std::string& msg);
void warn(const std::string& msg);
void info(const std::string& msg);
void debug(const std::string& msg);

/// Start collecting warnings (in addition to printing them). Used by the CLI
/// to record warnings in run metadata.
void capture_warnings(bool enable);
std::vector<std::string> captured_warnings();
void clear_captured_warnings();

}  // namespace vrec::log

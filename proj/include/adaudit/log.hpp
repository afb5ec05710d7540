#pragma once

#include <string>

namespace adaudit::log {

// Verbosity from ADAUDIT_LOG: quiet | info (default) | debug.
enum class Level : int { Quiet = 0, Info = 1, Debug = 2 };

Level level();
void info(const std::string& msg);
void warn(const std::string& msg);  // shown unless quiet
void debug(const std::string& msg);

}  // namespace adaudit::log

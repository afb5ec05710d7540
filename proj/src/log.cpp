#include "adaudit/log.hpp"

#include <cstdlib>
#include <iostream>

namespace adaudit::log {

Level level() {
    static const Level lvl = [] {
        const char* env = std::getenv("ADAUDIT_LOG");
        if (!env) return Level::Info;
        const std::string v(env);
        if (v == "quiet") return Level::Quiet;
        if (v == "debug") return Level::Debug;
        return Level::Info;
    }();
    return lvl;
}

void info(const std::string& msg) {
    if (level() >= Level::Info) std::cerr << "[adaudit] " << msg << '\n';
}

void warn(const std::string& msg) {
    if (level() >= Level::Info) std::cerr << "[adaudit] warning: " << msg << '\n';
}

void debug(const std::string& msg) {
    if (level() >= Level::Debug) std::cerr << "[adaudit] debug: " << msg << '\n';
}

}  // namespace adaudit::log

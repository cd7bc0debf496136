#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

#include "autohybrid/log.hpp"
#include "autohybrid/parallel.hpp"

namespace autohybrid {

namespace {
std::atomic<LogLevel> g_level{LogLevel::warning};
std::mutex g_log_mutex;

void emit(std::string_view tag, std::string_view message) {
    std::lock_guard lock(g_log_mutex);
    std::cerr << tag << message << '\n';
}
} // namespace

void set_log_level(LogLevel level) noexcept { g_level = level; }
LogLevel log_level() noexcept { return g_level; }

void log_warning(std::string_view message) {
    if (g_level.load() >= LogLevel::warning) emit("warning: ", message);
}

void log_info(std::string_view message) {
    if (g_level.load() >= LogLevel::info) emit("", message);
}

int resolve_jobs(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("AUTOHYBRID_JOBS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return v;
        } catch (const std::exception&) {
        }
    }
    return 1;
}

} // namespace autohybrid

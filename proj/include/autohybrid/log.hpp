#pragma once

#include <string_view>

namespace autohybrid {

enum class LogLevel { quiet, warning, info };

void set_log_level(LogLevel level) noexcept;
LogLevel log_level() noexcept;

/// Thread-safe line output to stderr.
void log_warning(std::string_view message);
void log_info(std::string_view message);

} // namespace autohybrid

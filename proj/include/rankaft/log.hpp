#pragma once

#include <string_view>

namespace rankaft {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

/// Read once from RANK_AFT_LOG (error | info | debug); defaults to error.
LogLevel log_level();

/// Writes "[level] message" to stderr when `level` is enabled.
void log(LogLevel level, std::string_view message);

}  // namespace rankaft

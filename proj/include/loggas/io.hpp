#pragma once

#include <string>

namespace loggas {

enum class LogLevel { Quiet = 0, Error, Warn, Info, Debug };

// From LOGGAS_LOG (quiet|error|warn|info|debug); warn when unset.
LogLevel log_level();
void log(LogLevel level, const std::string& msg);

// Rewrites a CSV table as a JSON array of row objects; numeric cells become numbers.
void csv_to_json(const std::string& csv_path, const std::string& json_path);

void write_text(const std::string& path, const std::string& text);

}  // namespace loggas

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rankaft::detail {

/// Splits one CSV line on commas. Quoted fields are not supported.
std::vector<std::string> split_csv_line(std::string_view line);

/// Parses a finite decimal, rejecting trailing garbage. `where` names the cell in errors.
double parse_number(std::string_view cell, const std::string& where);

std::string trim(std::string_view s);

/// Splits text into lines, dropping a trailing '\r' and blank lines.
std::vector<std::string> nonempty_lines(const std::string& text);

std::string read_file(const std::string& path);

}  // namespace rankaft::detail

#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace overlay::csv {

/// Splits one line on commas. No quoting: none of the files written
/// here contain quoted fields.
std::vector<std::string> split(std::string_view line);

/// Reads the next non-empty line, stripping a trailing '\r'.
bool next_line(std::istream& in, std::string& line);

/// Throws std::runtime_error when `line` does not equal `expected`.
void expect_header(std::istream& in, std::string_view expected);

long long to_int(const std::string& field);
double to_double(const std::string& field);

}  // namespace overlay::csv

#pragma once

#include <string>
#include <vector>

namespace caes {

// Shortest representation that round-trips (at most 17 significant digits).
std::string fmt(double v);

// Splits one CSV line on commas; no quoting support.
std::vector<std::string> split_csv(const std::string& line);

// Strict full-string double parse; throws std::invalid_argument with context.
double parse_double(const std::string& text, const std::string& context);

}  // namespace caes

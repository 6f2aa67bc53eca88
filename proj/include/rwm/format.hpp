#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rwm {

/// Shortest round-trip decimal form ("nan", "inf", "-inf" for non-finite).
std::string format_double(double x);

/// Parses a full string as a double; throws std::invalid_argument otherwise.
double parse_double(std::string_view text);

/// Comma-separated doubles.
std::vector<double> parse_double_list(std::string_view text);

}  // namespace rwm

#pragma once

#include <string>
#include <string_view>

namespace p2psim::util {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Fixed-point with `digits` decimals, for human-facing tables.
std::string format_fixed(double value, int digits);

// Strict decimal parse; throws ValidationError on trailing garbage.
double parse_double(std::string_view text);

long long parse_integer(std::string_view text);

} // namespace p2psim::util

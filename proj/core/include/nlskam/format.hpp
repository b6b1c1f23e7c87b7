#pragma once

#include <string>
#include <string_view>

namespace nlskam
{

// Shortest decimal representation that parses back to the same double.
std::string format_real(double x);

// Strict parse of a full token; throws std::invalid_argument on junk.
double parse_real(std::string_view token);
long long parse_integer(std::string_view token);

} // namespace nlskam

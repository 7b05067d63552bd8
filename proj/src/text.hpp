#pragma once

// Small text helpers shared by the parsers and report writers.

#include <string>
#include <string_view>
#include <vector>

namespace bvtk::text {

/// Whole-string strtod; throws ParameterError naming `what` on failure or non-finite input.
double parse_real(std::string_view text, const char* what);
/// Like parse_real but accepts "nan" / "inf" (for sentinel cells).
double parse_real_any(std::string_view text, const char* what);
std::string trim(std::string_view s);
/// Shortest round-trip decimal form.
std::string fmt_real(double v);
std::vector<std::string> split(std::string_view s, char sep);
/// Whitespace-separated tokens of a line with any '#' comment removed.
std::vector<std::string> tokens(std::string_view line);

}  // namespace bvtk::text

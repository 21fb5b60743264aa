#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hmit::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_runtime_error = 1;
inline constexpr int exit_usage_error = 2;

// "40" -> 0.40, "0.4" -> 0.40. Values above 1 are read as percentages.
double parse_fraction(const std::string& text);

// "5,10,15" or "10..60" (step 10) or "10..60:5"; each value normalized
// with parse_fraction. Throws std::invalid_argument on empty input.
std::vector<double> parse_values(const std::string& text);

// Runs `hmit <args...>`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hmit::cli

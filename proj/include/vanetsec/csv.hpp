#pragma once

#include <string>
#include <vector>

namespace vanetsec {

/// Shortest round-trippable decimal form of a double ("%.17g" fallback),
/// stable across runs for byte-identical CSV output.
std::string fmt_double(double v);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace vanetsec

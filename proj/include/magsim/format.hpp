#pragma once

#include <string>

namespace magsim {

// Shortest round-trip decimal form, independent of the global locale.
std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace magsim

#pragma once

#include <string>

namespace hyperbergman {

/// Shortest decimal string that parses back to exactly the same double.
std::string shortest_repr(double v);

/// Locale-independent "%.17g"; used wherever output must be byte-stable.
std::string fmt17(double v);

/// Parses a decimal string produced by either function above.
double parse_double(const std::string& s);

}  // namespace hyperbergman

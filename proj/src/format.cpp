#include "hyperbergman/format.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <system_error>

#include "hyperbergman/error.hpp"

namespace hyperbergman {

std::string shortest_repr(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw Error(ErrorKind::Data, "format", "cannot format value");
    return std::string(buf.data(), ptr);
}

std::string fmt17(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    if (ec != std::errc{}) throw Error(ErrorKind::Data, "format", "cannot format value");
    return std::string(buf.data(), ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw Error(ErrorKind::Data, "schema-mismatch", "not a decimal number: '" + s + "'");
    return v;
}

}  // namespace hyperbergman

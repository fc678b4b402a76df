#include "hyperbergman/sl2z.hpp"

#include <cmath>

namespace hyperbergman {

SL2Z canonical_sign(const SL2Z& t) {
    const std::int64_t lead = t.a != 0 ? t.a : (t.b != 0 ? t.b : t.c);
    if (lead < 0) return {-t.a, -t.b, -t.c, -t.d};
    return t;
}

std::string to_string(const SL2Z& t) {
    return "[" + std::to_string(t.a) + "," + std::to_string(t.b) + ";" + std::to_string(t.c) + "," +
           std::to_string(t.d) + "]";
}

FundamentalReduction reduce_to_fundamental_domain(const HPoint& z) {
    SL2Z gamma;
    double x = z.x(), y = z.y();
    for (int iter = 0; iter < 10000; ++iter) {
        const double n = std::nearbyint(x);
        if (n != 0.0) {
            x -= n;
            gamma = SL2Z::T(-static_cast<std::int64_t>(n)) * gamma;
        }
        const double r2 = x * x + y * y;
        if (r2 >= 1.0 - 1e-15) return {gamma, HPoint(x, y)};
        x = -x / r2;
        y = y / r2;
        gamma = SL2Z::S() * gamma;
    }
    throw Error(ErrorKind::Numerical, "reduction-failed", "fundamental-domain reduction did not terminate");
}

}  // namespace hyperbergman

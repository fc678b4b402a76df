#pragma once

#include <cstdint>
#include <string>

#include "hyperbergman/hplane.hpp"

namespace hyperbergman {

/// Integer unimodular matrix [[a, b], [c, d]].
struct SL2Z {
    std::int64_t a = 1, b = 0, c = 0, d = 1;

    static SL2Z identity() { return {}; }
    static SL2Z S() { return {0, -1, 1, 0}; }
    static SL2Z T(std::int64_t n = 1) { return {1, n, 0, 1}; }

    std::int64_t det() const { return a * d - b * c; }
    Mobius to_mobius() const {
        return {static_cast<double>(a), static_cast<double>(b), static_cast<double>(c), static_cast<double>(d)};
    }
    bool is_plus_minus_identity() const { return b == 0 && c == 0 && a == d && (a == 1 || a == -1); }

    friend bool operator==(const SL2Z&, const SL2Z&) = default;
};

inline SL2Z operator*(const SL2Z& s, const SL2Z& t) {
    return {s.a * t.a + s.b * t.c, s.a * t.b + s.b * t.d, s.c * t.a + s.d * t.c, s.c * t.b + s.d * t.d};
}

inline SL2Z inverse(const SL2Z& t) { return {t.d, -t.b, -t.c, t.a}; }

/// Representative of {t, -t} with the first nonzero of (a, b, c) positive.
SL2Z canonical_sign(const SL2Z& t);

std::string to_string(const SL2Z& t);

/// Result of pulling a point into the standard fundamental domain
/// F = {|x| <= 1/2, |z| >= 1}: w = gamma z.
struct FundamentalReduction {
    SL2Z gamma;
    HPoint w;
};

FundamentalReduction reduce_to_fundamental_domain(const HPoint& z);

}  // namespace hyperbergman

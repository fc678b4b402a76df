#pragma once

#include <cstdint>
#include <vector>

// Small integer helpers used by the congruence-group code, the modular
// symbols engine and the data audits.
namespace hyperbergman::nt {

bool is_prime(std::int64_t n);

/// Representative of a mod n in [0, n).
std::int64_t mod(std::int64_t a, std::int64_t n);

/// Inverse of a modulo n; requires gcd(a, n) = 1.
std::int64_t inverse_mod(std::int64_t a, std::int64_t n);

/// Extended Euclid: returns g = gcd(a, b) and sets x, y with a*x + b*y = g.
std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y);

/// Legendre symbol (a/p) for an odd prime p.
int legendre(std::int64_t a, std::int64_t p);

/// True when a is congruent to a square (including 0) modulo the prime p.
bool is_square_mod(std::int64_t a, std::int64_t p);

int divisor_count(std::int64_t n);

std::vector<std::int64_t> primes_up_to(std::int64_t n);

/// Number of elliptic points of order 2 and 3 on X_0(p), p prime.
int elliptic_points_order2(std::int64_t p);
int elliptic_points_order3(std::int64_t p);

/// Genus of X_0(p) from the Riemann-Hurwitz formula
/// g = 1 + (p+1)/12 - nu2/4 - nu3/3 - cusps/2.
int genus_x0_prime(std::int64_t p);

/// Genus of X_0(p) from the floor closed form (independent route):
/// floor((p+1)/12) - [p = 1 mod 12], and 0 for p = 2, 3.
int genus_x0_prime_floor(std::int64_t p);

}  // namespace hyperbergman::nt

#include "hyperbergman/numtheory.hpp"

#include <stdexcept>

namespace hyperbergman::nt {

bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0) return false;
    for (std::int64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

std::int64_t mod(std::int64_t a, std::int64_t n) {
    std::int64_t r = a % n;
    return r < 0 ? r + n : r;
}

std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
    std::int64_t x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        const std::int64_t q = a / b;
        std::int64_t t = a - q * b; a = b; b = t;
        t = x0 - q * x1; x0 = x1; x1 = t;
        t = y0 - q * y1; y0 = y1; y1 = t;
    }
    if (a < 0) { a = -a; x0 = -x0; y0 = -y0; }
    x = x0;
    y = y0;
    return a;
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t n) {
    std::int64_t x, y;
    if (ext_gcd(mod(a, n), n, x, y) != 1)
        throw std::invalid_argument("inverse_mod: argument not invertible");
    return mod(x, n);
}

int legendre(std::int64_t a, std::int64_t p) {
    a = mod(a, p);
    if (a == 0) return 0;
    // Euler's criterion by square-and-multiply; p is small so 128-bit products are not needed.
    std::int64_t result = 1, base = a, e = (p - 1) / 2;
    while (e > 0) {
        if (e & 1) result = static_cast<std::int64_t>((static_cast<__int128>(result) * base) % p);
        base = static_cast<std::int64_t>((static_cast<__int128>(base) * base) % p);
        e >>= 1;
    }
    return result == 1 ? 1 : -1;
}

bool is_square_mod(std::int64_t a, std::int64_t p) {
    if (p == 2) return true;
    return legendre(a, p) >= 0;
}

int divisor_count(std::int64_t n) {
    int count = 0;
    for (std::int64_t d = 1; d * d <= n; ++d) {
        if (n % d == 0) count += (d * d == n) ? 1 : 2;
    }
    return count;
}

std::vector<std::int64_t> primes_up_to(std::int64_t n) {
    std::vector<std::int64_t> out;
    if (n < 2) return out;
    std::vector<bool> sieve(static_cast<std::size_t>(n + 1), true);
    for (std::int64_t i = 2; i <= n; ++i) {
        if (!sieve[static_cast<std::size_t>(i)]) continue;
        out.push_back(i);
        for (std::int64_t j = i * i; j <= n; j += i) sieve[static_cast<std::size_t>(j)] = false;
    }
    return out;
}

int elliptic_points_order2(std::int64_t p) {
    if (p == 2) return 1;
    return 1 + legendre(-1, p);
}

int elliptic_points_order3(std::int64_t p) {
    if (p == 3) return 1;
    if (p == 2) return 0;
    return 1 + legendre(-3, p);
}

int genus_x0_prime(std::int64_t p) {
    if (!is_prime(p)) throw std::invalid_argument("genus_x0_prime: level must be prime");
    // 12g = 12 + (p+1) - 3 nu2 - 4 nu3 - 6 * cusps, with two cusps.
    const std::int64_t twelve_g = 12 + (p + 1) - 3 * elliptic_points_order2(p)
                                  - 4 * elliptic_points_order3(p) - 12;
    return static_cast<int>(twelve_g / 12);
}

int genus_x0_prime_floor(std::int64_t p) {
    if (!is_prime(p)) throw std::invalid_argument("genus_x0_prime_floor: level must be prime");
    if (p < 5) return 0;
    const int base = static_cast<int>((p + 1) / 12);
    return (p % 12 == 1) ? base - 1 : base;
}

}  // namespace hyperbergman::nt

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "hyperbergman/modsym.hpp"
#include "hyperbergman/numtheory.hpp"

using namespace hyperbergman;

namespace {

// q-expansion of eta(z)^2 eta(11z)^2 / q, by direct product of (1 - q^n)^2 (1 - q^{11n})^2.
std::vector<long long> eta_product_11(int M) {
    std::vector<long long> c(M, 0);
    c[0] = 1;
    auto times = [&](int step) {
        for (int n = step; n < M; n += step)
            for (int rep = 0; rep < 2; ++rep)
                for (int k = M - 1; k >= n; --k) c[k] -= c[k - n];
    };
    times(1);
    times(11);
    return c;
}

std::vector<double> matmul(const std::vector<double>& A, const std::vector<double>& B, int n) {
    std::vector<double> C(n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) C[i * n + j] += A[i * n + k] * B[k * n + j];
    return C;
}

}  // namespace

TEST_CASE("Heilbronn set against brute force") {
    for (std::int64_t n : {1, 2, 3, 5, 7, 12}) {
        std::size_t count = 0;
        for (std::int64_t a = 1; a <= n + 1; ++a)
            for (std::int64_t d = 1; d <= n + 1; ++d)
                for (std::int64_t b = 0; b < a; ++b)
                    for (std::int64_t c = 0; c < d; ++c)
                        if (a * d - b * c == n) ++count;
        const auto set = modsym::heilbronn_merel(n);
        CHECK(set.size() == count);
        for (const auto& h : set) {
            CHECK(h.a * h.d - h.b * h.c == n);
            CHECK(h.a > h.b);
            CHECK(h.b >= 0);
            CHECK(h.d > h.c);
            CHECK(h.c >= 0);
        }
    }
}

TEST_CASE("plus space dimension and Hecke algebra") {
    for (std::int64_t N : {11, 23, 29, 31, 37}) {
        const modsym::PlusSpace space(N);
        const int n = space.dimension();
        CHECK(n == nt::genus_x0_prime_floor(N) + 1);
        const auto T2 = space.hecke_matrix(2), T3 = space.hecke_matrix(3);
        const auto A = matmul(T2, T3, n), B = matmul(T3, T2, n);
        for (int k = 0; k < n * n; ++k) CHECK(A[k] == doctest::Approx(B[k]).epsilon(1e-12));
        // trace of T_p = (p + 1) from the Eisenstein line + sum of cusp eigenvalues
        const auto forms = modsym::newforms(N, 20);
        for (int p : {2, 3, 5, 7}) {
            const auto T = space.hecke_matrix(p);
            double tr = 0.0, cusp = p + 1.0;
            for (int k = 0; k < n; ++k) tr += T[k * n + k];
            for (const auto& f : forms) cusp += f.coefficients[p - 1];
            CHECK(tr == doctest::Approx(cusp).epsilon(1e-9));
        }
    }
}

TEST_CASE("level 11 newform is the eta product") {
    const int M = 300;
    const auto forms = modsym::newforms(11, M);
    REQUIRE(forms.size() == 1);
    const auto eta = eta_product_11(M);
    for (int n = 1; n <= M; ++n) CHECK(forms[0].coefficients[n - 1] == doctest::Approx(eta[n - 1]).epsilon(1e-9));
    CHECK(forms[0].label == "11.2.a.a.1.1");
    CHECK(forms[0].fricke_sign == -1);
}

TEST_CASE("level 37: the two rational newforms") {
    const auto forms = modsym::newforms(37, 40);
    REQUIRE(forms.size() == 2);
    // 37a: rank 1 curve y^2 + y = x^3 - x; 37b: y^2 + y = x^3 + x^2 - 23x - 50
    const std::vector<int> a{1, -2, -3, 2, -2, 6, -1, 0, 6, 4, -5, -6};
    const std::vector<int> b{1, 0, 1, -2, 0, 0, -1, 0, -2, 0, 3, -2};
    const auto& fa = forms[0].coefficients[1] < -1 ? forms[0] : forms[1];
    const auto& fb = forms[0].coefficients[1] < -1 ? forms[1] : forms[0];
    for (int n = 0; n < 12; ++n) {
        CHECK(fa.coefficients[n] == doctest::Approx(a[n]).epsilon(1e-9));
        CHECK(fb.coefficients[n] == doctest::Approx(b[n]).epsilon(1e-9));
    }
    // a_37 = -eps needs M >= 37; below that the sign is left at 0
    CHECK(modsym::newforms(37, 12)[0].fricke_sign == 0);
    CHECK(fa.fricke_sign == 1);
    CHECK(fb.fricke_sign == -1);
}

TEST_CASE("Hecke polynomials of T_2 on the quadratic orbits") {
    struct Case {
        int N;
        double s, p;  // x^2 - s x + p
    };
    for (auto c : {Case{23, -1, -1}, Case{29, -2, -1}, Case{31, 1, -1}}) {
        const auto forms = modsym::newforms(c.N, 10);
        REQUIRE(forms.size() == 2);
        const double x = forms[0].coefficients[1], y = forms[1].coefficients[1];
        CHECK(x + y == doctest::Approx(c.s).epsilon(1e-10));
        CHECK(x * y == doctest::Approx(c.p).epsilon(1e-10));
        CHECK(forms[0].orbit_dim == 2);
    }
}

TEST_CASE("multiplicativity, prime-power recursion and Deligne bound") {
    for (int N : {23, 29, 31, 37}) {
        const int M = 400;
        for (const auto& f : modsym::newforms(N, M)) {
            const auto& a = f.coefficients;
            CHECK(a[0] == 1.0);
            CHECK(a[N - 1] == doctest::Approx(-f.fricke_sign));
            for (int m = 2; m * m <= M; ++m)
                for (int n = m + 1; m * n <= M; ++n)
                    if (std::gcd(m, n) == 1) CHECK(a[m * n - 1] == doctest::Approx(a[m - 1] * a[n - 1]).epsilon(1e-8));
            for (int p : {2, 3, 5, 7, 11, 13}) {
                if (p == N) continue;
                CHECK(a[p * p - 1] == doctest::Approx(a[p - 1] * a[p - 1] - p).epsilon(1e-8));
            }
            for (int n = 1; n <= M; ++n)
                CHECK(std::abs(a[n - 1]) <= nt::divisor_count(n) * std::sqrt(double(n)) + 1e-6);
        }
    }
}

TEST_CASE("orbit letters") {
    CHECK(modsym::orbit_letters(0) == "a");
    CHECK(modsym::orbit_letters(25) == "z");
    CHECK(modsym::orbit_letters(26) == "ba");
}

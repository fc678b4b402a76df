#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hyperbergman/format.hpp"
#include "hyperbergman/hplane.hpp"
#include "hyperbergman/numtheory.hpp"
#include "hyperbergman/sl2z.hpp"

using namespace hyperbergman;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

Mobius random_mobius(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    while (true) {
        const double a = U(rng), b = U(rng), c = U(rng), d = U(rng);
        if (a * d - b * c > 0.2) return Mobius(a, b, c, d);
    }
}

HPoint random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> X(-3.0, 3.0), L(-2.0, 2.0);
    return HPoint(X(rng), std::exp(L(rng)));
}

bool same(const Mobius& s, const Mobius& t, double tol) {
    for (int i = 0; i < 4; ++i)
        if (std::abs(s.entries()[i] - t.entries()[i]) > tol) return false;
    return true;
}

}  // namespace

TEST_CASE("points reject the boundary and the lower half-plane") {
    CHECK_THROWS_AS(HPoint(0.0, 0.0), Error);
    CHECK_THROWS_AS(HPoint(0.0, -1.0), Error);
    CHECK_THROWS_AS(HPoint(std::nan(""), 1.0), Error);
}

TEST_CASE("transforms are normalized and sign-canonical") {
    const Mobius t(2.0, 0.0, 0.0, 2.0);
    CHECK(t == Mobius::identity());
    const Mobius s(-1.0, -1.0, 0.0, -1.0);
    CHECK(s.a() == doctest::Approx(1.0));
    CHECK(s.b() == doctest::Approx(1.0));
    const Mobius u(3.0, 1.0, 2.0, 1.0);
    CHECK(u.a() * u.d() - u.b() * u.c() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(Mobius(1.0, 0.0, 0.0, -1.0), Error);
}

TEST_CASE("mobius_apply examples") {
    const auto p = mobius_apply(Mobius::identity(), HPoint(0.0, 1.0));
    CHECK(p == HPoint(0.0, 1.0));
    const auto q = mobius_apply(Mobius(1, 1, 0, 1), HPoint(0.0, 1.0));
    CHECK(q.x() == doctest::Approx(1.0));
    CHECK(q.y() == doctest::Approx(1.0));
    const auto r = mobius_apply(Mobius(0, -1, 1, 0), HPoint(0.0, 2.0));
    CHECK(std::abs(r.x()) < 1e-15);
    CHECK(r.y() == doctest::Approx(0.5));
}

TEST_CASE("compose and inverse examples") {
    std::mt19937_64 rng(7);
    const Mobius t = random_mobius(rng);
    CHECK(same(compose(t, inverse(t)), Mobius::identity(), 1e-12));
    CHECK(same(compose(Mobius::identity(), t), t, 1e-15));
    const Mobius T(1, 1, 0, 1);
    CHECK(same(compose(T, T), Mobius(1, 2, 0, 1), 1e-15));
}

TEST_CASE("distance examples against exact values") {
    CHECK(cosh_distance(HPoint(0, 1), HPoint(0, 1)) == 1.0);
    // axis oracle: cosh(ln(y2/y1)) = (y1/y2 + y2/y1)/2
    CHECK(cosh_distance(HPoint(0, 1), HPoint(0, 2)) == doctest::Approx((0.5 + 2.0) / 2.0).epsilon(1e-15));
    CHECK(cosh_distance(HPoint(0, 1), HPoint(1, 1)) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(hyp_distance(HPoint(0, 1), HPoint(0, 1)) == 0.0);
    CHECK(hyp_distance(HPoint(0, 1), HPoint(0, 2)) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("distance agrees with a 50-digit replay of the same formulas") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const HPoint p = random_point(rng), q = random_point(rng);
        const BasicHPoint<big> P(big(p.x()), big(p.y())), Q(big(q.x()), big(q.y()));
        const big exact = hyp_distance(P, Q);
        const double got = hyp_distance(p, q);
        CHECK(std::abs(got - exact.convert_to<double>()) <= 1e-13 * std::max(1.0, got));
    }
    // nearby points: the asinh form keeps relative accuracy
    const HPoint a(0.3, 1.7), b(0.3 + 1e-9, 1.7);
    const big e = hyp_distance(BasicHPoint<big>(big(a.x()), big(a.y())), BasicHPoint<big>(big(b.x()), big(b.y())));
    CHECK(hyp_distance(a, b) == doctest::Approx(e.convert_to<double>()).epsilon(1e-9));
}

TEST_CASE("properties on random inputs") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
        const Mobius s = random_mobius(rng), t = random_mobius(rng), u = random_mobius(rng);
        const HPoint z1 = random_point(rng), z2 = random_point(rng), z3 = random_point(rng);
        const double d12 = hyp_distance(z1, z2);
        // isometry
        CHECK(std::abs(hyp_distance(mobius_apply(t, z1), mobius_apply(t, z2)) - d12) <= 1e-10 * std::max(1.0, d12));
        // triangle inequality
        CHECK(hyp_distance(z1, z3) <= d12 + hyp_distance(z2, z3) + 1e-10);
        // associativity and inverses
        CHECK(same(compose(compose(s, t), u), compose(s, compose(t, u)), 1e-12 * 100));
        CHECK(same(compose(inverse(t), t), Mobius::identity(), 1e-10));
        // action is compatible with composition
        const HPoint a = mobius_apply(compose(s, t), z1), b = mobius_apply(s, mobius_apply(t, z1));
        CHECK(hyp_distance(a, b) <= 1e-10);
        CHECK(cosh_distance(z1, z2) == doctest::Approx(cosh_distance(z2, z1)).epsilon(1e-15));
    }
}

TEST_CASE("SL2(Z) reduction lands in the standard fundamental domain") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> X(-5, 5), L(-6, 1);
    for (int i = 0; i < 500; ++i) {
        const HPoint z(X(rng), std::exp(L(rng)));
        const auto red = reduce_to_fundamental_domain(z);
        CHECK(red.gamma.det() == 1);
        CHECK(std::abs(red.w.x()) <= 0.5 + 1e-12);
        CHECK(std::norm(red.w.z()) >= 1.0 - 1e-9);
        const HPoint back = mobius_apply(red.gamma.to_mobius(), z);
        CHECK(hyp_distance(back, red.w) <= 1e-8);
    }
}

TEST_CASE("number theory helpers") {
    CHECK(nt::is_prime(37));
    CHECK_FALSE(nt::is_prime(1));
    CHECK_FALSE(nt::is_prime(91));
    CHECK(nt::inverse_mod(3, 23) * 3 % 23 == 1);
    CHECK(nt::mod(-5, 23) == 18);
    CHECK(nt::divisor_count(12) == 6);
    // both genus routes agree on every prime below 500
    for (auto p : nt::primes_up_to(500)) CHECK(nt::genus_x0_prime(p) == nt::genus_x0_prime_floor(p));
    CHECK(nt::genus_x0_prime(11) == 1);
    CHECK(nt::genus_x0_prime(23) == 2);
    CHECK(nt::genus_x0_prime(37) == 2);
    CHECK(nt::elliptic_points_order2(29) == 2);
    CHECK(nt::elliptic_points_order3(31) == 2);
    CHECK(nt::elliptic_points_order2(23) == 0);
    CHECK(nt::elliptic_points_order3(23) == 0);
}

TEST_CASE("number formatting round trips") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = U(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(parse_double(shortest_repr(v)) == v);
        CHECK(parse_double(fmt17(v)) == v);
    }
    CHECK(shortest_repr(0.1) == "0.1");
}

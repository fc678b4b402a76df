#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hyperbergman/error.hpp"
#include "hyperbergman/product.hpp"

using namespace hyperbergman;

namespace {

const CuspFormBasis& basis23() {
    static const CuspFormBasis b = [] {
        FetchOptions opts;
        opts.fixtures_dir = std::filesystem::path(HB_SOURCE_DIR) / "data" / "fixtures";
        std::vector<QExpansion> forms;
        for (const auto& r : fetch_level(23, opts)) forms.push_back(qexpansion_from_record(r));
        return build_basis(forms, 15);
    }();
    return b;
}

const SurfaceGeometry geom23 = make_geometry(2.6339157938496331, 2);

std::string error_code(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

ProductPoint random_point(int d, std::mt19937_64& rng) {
    std::vector<HPoint> pts;
    for (int k = 0; k < d; ++k) pts.push_back(sample_cell_point(23, rng));
    return ProductPoint(pts);
}

}  // namespace

TEST_CASE("product point validation") {
    CHECK(error_code([] { ProductPoint(std::vector<HPoint>{}); }) == "invalid-dimension");
    const std::vector<HPoint> three(3, HPoint(0, 1));
    CHECK(error_code([&] { ProductPoint(three, 3); }) == "d-exceeds-gonality");
    CHECK(ProductPoint(three, 4).d() == 3);
}

TEST_CASE("product hyperbolic density") {
    const auto g = make_geometry(3.0, 2);
    CHECK(product_hyp_density(ProductPoint({HPoint(0, 1)}), g) == doctest::Approx(1.0 / (4 * M_PI)).epsilon(1e-15));
    CHECK(product_hyp_density(ProductPoint({HPoint(0, 2), HPoint(0, 2)}), g) ==
          doctest::Approx(1.0 / std::pow(4 * M_PI, 2) / 16.0).epsilon(1e-15));
    const ProductPoint a({HPoint(0.1, 0.5), HPoint(-0.2, 1.5), HPoint(0.3, 0.7)});
    const ProductPoint b({HPoint(0.3, 0.7), HPoint(0.1, 0.5), HPoint(-0.2, 1.5)});
    CHECK(product_hyp_density(a, g) == product_hyp_density(b, g));
}

TEST_CASE("kernel matrix structure") {
    const auto& b = basis23();
    const HPoint z(0.13, 0.41);
    const auto H1 = kernel_matrix(b, ProductPoint({z}));
    CHECK(H1(0, 0).real() == doctest::Approx(bergman_kernel(b, z)).epsilon(1e-14));
    const auto H2 = kernel_matrix(b, ProductPoint({z, z}));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(std::abs(H2(i, j) - H1(0, 0)) <= 1e-14 * H1(0, 0).real());
    CHECK(std::abs(H2.determinant()) <= 1e-14 * std::norm(H1(0, 0)));

    std::mt19937_64 rng(17);
    for (int t = 0; t < 20; ++t) {
        const auto H = kernel_matrix(b, random_point(3, rng));
        CHECK((H - H.adjoint()).norm() <= 1e-14 * H.norm());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10 * H.norm());
        // genus 2: three vectors in C^2 give a singular Gram matrix
        CHECK(std::abs(H.determinant()) <= 1e-10 * std::pow(H.norm(), 3));
    }
}

TEST_CASE("permutation expansion and determinant path") {
    const auto& b = basis23();
    const HPoint z(-0.21, 0.33);
    const double d1 = canonical_density_ratio(b, geom23, z);
    CHECK(canonical_volume_ratio_perm(b, geom23, ProductPoint({z})) == doctest::Approx(d1).epsilon(1e-12));
    CHECK(canonical_volume_ratio_det(b, geom23, ProductPoint({z})) == doctest::Approx(d1).epsilon(1e-12));
    CHECK(canonical_volume_ratio_perm(b, geom23, ProductPoint({z, z})) <= 1e-12 * d1 * d1);
    CHECK(canonical_volume_ratio_det(b, geom23, ProductPoint({z, z})) <= 1e-12 * d1 * d1);

    std::mt19937_64 rng(3);
    for (int d : {2, 3}) {
        for (int t = 0; t < 15; ++t) {
            const auto p = random_point(d, rng);
            const double perm = canonical_volume_ratio_perm(b, geom23, p);
            const double det = canonical_volume_ratio_det(b, geom23, p);
            if (d == 2) {
                CHECK(perm > 0.0);
                CHECK(std::abs(perm - det) <= 1e-9 * perm);
            } else {
                // genus 2 < d: both vanish; compare on the Hadamard scale vol^d prod B
                CHECK(std::abs(perm - det) <= 1e-9 * std::pow(geom23.hyp_volume, 3) * product_bergman(b, p));
            }
        }
    }
    const ProductPoint four({HPoint(0, 1), HPoint(0.1, 1), HPoint(0.2, 1), HPoint(0.3, 1)});
    CHECK_NOTHROW(canonical_volume_ratio_perm(b, geom23, four));
    const ProductPoint five({HPoint(0, 1), HPoint(0.1, 1), HPoint(0.2, 1), HPoint(0.3, 1), HPoint(0.4, 1)});
    CHECK(error_code([&] { canonical_volume_ratio_perm(b, geom23, five); }) == "d-too-large-for-permutation-path");
}

TEST_CASE("ratio paths on synthetic values") {
    // g = 3 synthetic orthonormal values; 2x2 determinant written out by hand
    std::mt19937_64 rng(99);
    std::normal_distribution<double> G;
    for (int t = 0; t < 50; ++t) {
        for (int d : {2, 3}) {
            Eigen::MatrixXcd V(d, 3);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < 3; ++j) V(i, j) = cplx(G(rng), G(rng));
            std::vector<double> y(d);
            for (auto& v : y) v = 0.2 + std::abs(G(rng));
            const double vol = 8 * M_PI;
            const double perm = ratio_perm_from_values(V, y, 3, vol);
            const double det = ratio_det_from_values(V, y, 3, vol);
            CHECK(std::abs(perm - det) <= 1e-9 * perm);
            if (d == 2) {
                cplx h[2][2];
                for (int a = 0; a < 2; ++a)
                    for (int c = 0; c < 2; ++c) h[a][c] = y[a] * y[c] * V.row(a).dot(V.row(c));
                const double manual = (h[0][0] * h[1][1] - h[0][1] * h[1][0]).real();
                CHECK(det == doctest::Approx(vol * vol * 2.0 / std::pow(3.0, 4) * manual).epsilon(1e-12));
            }
            // coordinate permutations
            std::vector<int> order(d);
            std::iota(order.begin(), order.end(), 0);
            std::reverse(order.begin(), order.end());
            Eigen::MatrixXcd W(d, 3);
            std::vector<double> yw(d);
            for (int i = 0; i < d; ++i) {
                W.row(i) = V.row(order[i]);
                yw[i] = y[order[i]];
            }
            CHECK(ratio_det_from_values(W, yw, 3, vol) == doctest::Approx(det).epsilon(1e-12));
            CHECK(ratio_perm_from_values(W, yw, 3, vol) == doctest::Approx(perm).epsilon(1e-12));
        }
    }
}

TEST_CASE("volume ratio bound arithmetic") {
    const auto g = make_geometry(3.0, 2);
    CHECK(thm32_bound(1, g, 16.0) == doctest::Approx(4 * M_PI * 16.0).epsilon(1e-15));
    CHECK(thm32_bound(2, g, 16.0) == doctest::Approx(4 * std::pow(32 * M_PI, 2)).epsilon(1e-14));
    CHECK(thm32_bound(2, g, 16.0) == doctest::Approx(40425.9).epsilon(1e-5));
    CHECK(thm32_bound(3, g, 16.0) == doctest::Approx(36 * std::pow(4 * M_PI * 16 / 4, 3)).epsilon(1e-14));
    double prev = 0.0;
    for (double B = 1.0; B < 40.0; B += 1.5) {
        const double v = thm32_bound(2, g, B);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("density ratio carries an explicit 1/g") {
    auto b = basis23();
    const HPoint z(0.05, 0.6);
    const double r2 = canonical_density_ratio(b, geom23, z);
    b.genus = 4;
    CHECK(canonical_density_ratio(b, geom23, z) == doctest::Approx(r2 / 2.0).epsilon(1e-15));
}

TEST_CASE("product Bergman kernel") {
    const auto& b = basis23();
    const HPoint z1(0.1, 0.3), z2(-0.3, 0.9);
    const double p = product_bergman(b, ProductPoint({z1, z2}));
    CHECK(p == doctest::Approx(bergman_kernel(b, z1) * bergman_kernel(b, z2)).epsilon(1e-15));
    CHECK(product_bergman(b, ProductPoint({z2, z1})) == p);
    CHECK(p >= 0.0);
}

TEST_CASE("merging two coordinates sends the ratio to zero quadratically") {
    const auto& b = basis23();
    const HPoint z(0.17, 0.52);
    std::vector<double> sep, ratio;
    for (double h = 1e-1; h > 1e-4; h /= 2) {
        const HPoint w(z.x() + h, z.y());
        sep.push_back(hyp_distance(z, w));
        ratio.push_back(canonical_volume_ratio_det(b, geom23, ProductPoint({z, w})));
    }
    CHECK(loglog_slope(sep, ratio) == doctest::Approx(2.0).epsilon(0.15));
    CHECK(loglog_slope({1, 2, 4}, {3, 12, 48}) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("sampling") {
    std::mt19937_64 a(1), b(1);
    for (int k = 0; k < 100; ++k) {
        const double u = unit_uniform(a);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(u == unit_uniform(b));
    }
    std::mt19937_64 r(2);
    for (int k = 0; k < 200; ++k) CHECK(sample_cell_point(31, r).y() > 0.0);
}

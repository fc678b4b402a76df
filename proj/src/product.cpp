#include "hyperbergman/product.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hyperbergman/error.hpp"

namespace hyperbergman {

ProductPoint::ProductPoint(std::vector<HPoint> pts, std::optional<int> gonality) : points(std::move(pts)) {
    if (points.empty()) throw Error(ErrorKind::Usage, "invalid-dimension", "a product point needs d >= 1");
    if (gonality && d() >= *gonality)
        throw Error(ErrorKind::Usage, "d-exceeds-gonality",
                    "d = " + std::to_string(d()) + " is not below the gonality " + std::to_string(*gonality));
}

double product_hyp_density(const ProductPoint& p, const SurfaceGeometry& geom) {
    // sorted heights make the value independent of the coordinate order
    std::vector<double> ys;
    for (const auto& z : p.points) ys.push_back(z.y());
    std::sort(ys.begin(), ys.end());
    double out = 1.0;
    for (double y : ys) out /= geom.hyp_volume * y * y;
    return out;
}

namespace {

Eigen::MatrixXcd basis_values(const CuspFormBasis& basis, const ProductPoint& p, std::vector<double>& heights) {
    Eigen::MatrixXcd v(p.d(), basis.genus);
    heights.clear();
    for (int a = 0; a < p.d(); ++a) {
        const auto vals = basis.values(p.points[static_cast<std::size_t>(a)]);
        for (int j = 0; j < basis.genus; ++j) v(a, j) = vals[static_cast<std::size_t>(j)];
        heights.push_back(p.points[static_cast<std::size_t>(a)].y());
    }
    return v;
}

Eigen::MatrixXcd kernel_from_values(const Eigen::MatrixXcd& values, const std::vector<double>& heights) {
    Eigen::MatrixXcd H = values * values.adjoint();
    for (Eigen::Index a = 0; a < H.rows(); ++a)
        for (Eigen::Index b = 0; b < H.cols(); ++b) H(a, b) *= heights[static_cast<std::size_t>(a)] * heights[static_cast<std::size_t>(b)];
    return H;
}

double factorial(int d) {
    double f = 1.0;
    for (int k = 2; k <= d; ++k) f *= k;
    return f;
}

int permutation_sign(const std::vector<int>& perm) {
    int sign = 1;
    std::vector<bool> seen(perm.size(), false);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (seen[i]) continue;
        std::size_t len = 0;
        for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(perm[j])) {
            seen[j] = true;
            ++len;
        }
        if (len % 2 == 0) sign = -sign;
    }
    return sign;
}

}  // namespace

Eigen::MatrixXcd kernel_matrix(const CuspFormBasis& basis, const ProductPoint& p) {
    std::vector<double> heights;
    const auto v = basis_values(basis, p, heights);
    return kernel_from_values(v, heights);
}

double ratio_perm_from_values(const Eigen::MatrixXcd& values, const std::vector<double>& heights, int genus,
                              double volume) {
    const int d = static_cast<int>(values.rows());
    if (d > 4)
        throw Error(ErrorKind::Usage, "d-too-large-for-permutation-path",
                    "the permutation expansion is limited to d <= 4, got d = " + std::to_string(d));
    std::vector<std::vector<int>> perms;
    std::vector<int> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), 0);
    do perms.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.end()));

    // sum over j in {1..g}^d, sigma, tau of sgn(sigma) sgn(tau) prod_k f_{j_k}(z_sigma(k)) conj(f_{j_k}(z_tau(k))),
    // accumulated in extended precision since the signed terms cancel near the diagonal
    using lcplx = std::complex<long double>;
    const Eigen::Matrix<lcplx, Eigen::Dynamic, Eigen::Dynamic> lv = values.cast<lcplx>();
    lcplx total = 0.0L;
    std::vector<int> j(static_cast<std::size_t>(d), 0);
    while (true) {
        for (const auto& sigma : perms) {
            const int s_sigma = permutation_sign(sigma);
            for (const auto& tau : perms) {
                lcplx term = static_cast<long double>(s_sigma * permutation_sign(tau));
                for (int k = 0; k < d; ++k) {
                    const auto uk = static_cast<std::size_t>(k);
                    term *= lv(sigma[uk], j[uk]) * std::conj(lv(tau[uk], j[uk]));
                }
                total += term;
            }
        }
        int pos = 0;
        while (pos < d && ++j[static_cast<std::size_t>(pos)] == genus) j[static_cast<std::size_t>(pos++)] = 0;
        if (pos == d) break;
    }
    double y2 = 1.0;
    for (double y : heights) y2 *= y * y;
    return std::pow(volume, d) / std::pow(static_cast<double>(genus), d * d) * y2 *
           static_cast<double>(std::abs(total));
}

double ratio_det_from_values(const Eigen::MatrixXcd& values, const std::vector<double>& heights, int genus,
                             double volume) {
    const int d = static_cast<int>(values.rows());
    // H = diag(y) V V^* diag(y) in extended precision, as for the permutation sum
    using lcplx = std::complex<long double>;
    using LMatrix = Eigen::Matrix<lcplx, Eigen::Dynamic, Eigen::Dynamic>;
    const LMatrix lv = values.cast<lcplx>();
    LMatrix H = lv * lv.adjoint();
    for (Eigen::Index a = 0; a < H.rows(); ++a)
        for (Eigen::Index b = 0; b < H.cols(); ++b)
            H(a, b) *= static_cast<long double>(heights[static_cast<std::size_t>(a)]) *
                       static_cast<long double>(heights[static_cast<std::size_t>(b)]);
    const double det = static_cast<double>(std::abs(H.determinant()));
    return std::pow(volume, d) * factorial(d) / std::pow(static_cast<double>(genus), d * d) * det;
}

double canonical_volume_ratio_perm(const CuspFormBasis& basis, const SurfaceGeometry& geom, const ProductPoint& p) {
    if (p.d() > 4)
        throw Error(ErrorKind::Usage, "d-too-large-for-permutation-path",
                    "the permutation expansion is limited to d <= 4, got d = " + std::to_string(p.d()));
    std::vector<double> heights;
    const auto v = basis_values(basis, p, heights);
    return ratio_perm_from_values(v, heights, basis.genus, geom.hyp_volume);
}

double canonical_volume_ratio_det(const CuspFormBasis& basis, const SurfaceGeometry& geom, const ProductPoint& p) {
    std::vector<double> heights;
    const auto v = basis_values(basis, p, heights);
    return ratio_det_from_values(v, heights, basis.genus, geom.hyp_volume);
}

double thm32_bound(int d, const SurfaceGeometry& geom, double B) {
    if (d < 1) throw Error(ErrorKind::Usage, "invalid-dimension", "d must be >= 1");
    const double f = factorial(d);
    return f * f * std::pow(geom.hyp_volume * B / std::pow(static_cast<double>(geom.genus), d - 1), d);
}

double product_bergman(const CuspFormBasis& basis, const ProductPoint& p) {
    double out = 1.0;
    for (const auto& z : p.points) out *= bergman_kernel(basis, z);
    return out;
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

HPoint sample_cell_point(int N, std::mt19937_64& rng, double y_max) {
    const auto cell = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(N + 1));
    const double x = unit_uniform(rng) - 0.5;
    const double y0 = std::sqrt(1.0 - x * x);
    const double y = y0 + (y_max - y0) * unit_uniform(rng);
    return mobius_apply(gamma0_coset_rep(cell).to_mobius(), HPoint(x, y));
}

double loglog_slope(const std::vector<double>& separation, const std::vector<double>& ratio) {
    const std::size_t n = std::min(separation.size(), ratio.size());
    if (n < 2) throw Error(ErrorKind::Usage, "too-few-samples", "a slope needs at least two samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(separation[i]), ly = std::log(ratio[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace hyperbergman

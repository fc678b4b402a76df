#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hyperbergman/modforms.hpp"

namespace hyperbergman {

/// A point (z_1, ..., z_d) of X^d.
struct ProductPoint {
    std::vector<HPoint> points;

    ProductPoint() = default;
    /// Throws invalid-dimension for d = 0 and d-exceeds-gonality when a
    /// gonality is given and d >= gonality.
    explicit ProductPoint(std::vector<HPoint> pts, std::optional<int> gonality = std::nullopt);

    int d() const { return static_cast<int>(points.size()); }
};

/// (1 / vol^d) * prod 1 / y_k^2, the density of the rescaled product
/// hyperbolic volume form against prod dx_k dy_k.
double product_hyp_density(const ProductPoint& p, const SurfaceGeometry& geom);

/// H[a][b] = y_a y_b sum_j f_j(z_a) conj(f_j(z_b)) for the orthonormal basis.
Eigen::MatrixXcd kernel_matrix(const CuspFormBasis& basis, const ProductPoint& p);

/// Literal expansion over (j_1..j_d) in {1..g}^d and sigma, tau in S_d,
/// times prod y_k^2 and vol^d / g^{d^2}. Throws d-too-large-for-permutation-path for d > 4.
double canonical_volume_ratio_perm(const CuspFormBasis& basis, const SurfaceGeometry& geom, const ProductPoint& p);

/// (vol^d d! / g^{d^2}) det H.
double canonical_volume_ratio_det(const CuspFormBasis& basis, const SurfaceGeometry& geom, const ProductPoint& p);

/// Both ratio paths from precomputed basis values f_j(z_a) (rows a, columns j).
double ratio_perm_from_values(const Eigen::MatrixXcd& values, const std::vector<double>& heights, int genus,
                              double volume);
double ratio_det_from_values(const Eigen::MatrixXcd& values, const std::vector<double>& heights, int genus,
                             double volume);

/// (d!)^2 (vol B / g^{d-1})^d.
double thm32_bound(int d, const SurfaceGeometry& geom, double B);

/// prod_i B_X(z_i).
double product_bergman(const CuspFormBasis& basis, const ProductPoint& p);

/// Uniform doubles in [0, 1) from the top 53 bits, identical on every platform.
double unit_uniform(std::mt19937_64& rng);

/// A point of rho_c F with c uniform over the N + 1 cells and the F part
/// uniform in x and in y between the arc and y_max.
HPoint sample_cell_point(int N, std::mt19937_64& rng, double y_max = 2.0);

/// Least-squares slope of log ratio against log separation.
double loglog_slope(const std::vector<double>& separation, const std::vector<double>& ratio);

}  // namespace hyperbergman

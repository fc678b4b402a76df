#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hyperbergman/fuchsian.hpp"
#include "hyperbergman/lmfdb.hpp"
#include "hyperbergman/sl2z.hpp"

namespace hyperbergman {

using cplx = std::complex<double>;

/// q-expansion f = sum a_n q^n of a weight-2 newform embedding on Gamma_0(N).
struct QExpansion {
    int level = 0;
    std::string label;
    std::vector<cplx> a;  // a[0] = a_1
    int fricke_sign = 0;  // f(-1/(Nz)) = fricke_sign * N z^2 f(z)

    int truncation() const { return static_cast<int>(a.size()); }
};

/// Converts an ingested record. Runs the Deligne audit and throws
/// Data/schema-mismatch when the record violates it.
QExpansion qexpansion_from_record(const NewformRecord& rec);

struct FormValue {
    cplx value;
    double error = 0.0;  // rigorous bound on the truncation tail plus a rounding allowance
};

/// Direct summation of sum a_n e^{2 pi i n z} at z, no reduction. Throws
/// truncation-insufficient when the tail bound exceeds `tol`.
FormValue q_series(const QExpansion& f, const HPoint& z, double tol = 1e-10);

/// How a point was moved to where the q-expansion converges quickly.
///
/// f(z) = factor * f(u) where factor = base^2 for the Gamma_0(N) branch and
/// eps * N * base^2 for the Fricke branch (eps the Fricke sign).
struct ReducedPoint {
    HPoint u{0.0, 1.0};
    bool fricke = false;
    cplx base;

    cplx factor(int N, int fricke_sign) const;
};

/// Reduces z to the standard fundamental domain, w = gamma z, and expresses
/// z = delta W_N (w + k)/N or z = delta w with delta in Gamma_0(N). The
/// evaluation point always has Im u >= sqrt(3) / (2N).
ReducedPoint reduce_for_level(int N, const HPoint& z);

/// f(z) with Fricke reduction and a rigorous truncation bound. The tolerance
/// applies to y |f(z)|, the quantity invariant under Gamma_0(N) and W_N.
FormValue evaluate_form(const QExpansion& f, const HPoint& z, double tol = 1e-10);

/// Values of several forms of the same level at z, sharing one reduction.
std::vector<FormValue> evaluate_forms(const std::vector<QExpansion>& forms, const HPoint& z, double tol = 1e-10);

/// Tests both Fricke signs against direct summation at a point where both
/// sides of f(-1/(Nz)) = eps N z^2 f(z) converge; returns the better sign.
int infer_fricke_sign(const QExpansion& f);

/// Quadrature over X_0(N) = union of rho_c F, with rho_c running over the
/// N + 1 coset representatives of Gamma_0(N) in SL2(Z).
struct QuadratureNode {
    HPoint w;       // node in the standard fundamental domain F
    double weight;  // weight for dx dy / y^2
};

struct CellDecomposition {
    int level = 0;
    int order = 0;
    std::vector<SL2Z> cosets;                       // rho_c
    std::vector<std::vector<QuadratureNode>> nodes;  // per cell, nodes in F

    std::size_t cell_count() const { return cosets.size(); }
    std::size_t node_count() const;
};

/// Gauss-Legendre orders supported: 10, 15, 20, 25, 30.
CellDecomposition make_cells(int N, int order = 20);

/// Integral over X_0(N) of a Gamma_0(N)-invariant function, dmu = dx dy / y^2.
double integrate(const CellDecomposition& cells, const std::function<double(const HPoint&)>& phi);

/// Hyperbolic area of X_0(N) by quadrature; equals (pi/3)(N + 1).
double quadrature_area(const CellDecomposition& cells);

struct GramResult {
    Eigen::MatrixXcd gram;   // <f_i, f_j> = integral f_i conj(f_j) y^2 dmu
    Eigen::MatrixXd error;   // |difference| between two quadrature orders
    int order = 0;
};

/// Petersson Gram matrix by quadrature at `order` and a higher order; the
/// higher-order value is returned. Throws quadrature-nonconvergent when an
/// entry's error estimate exceeds tol times the diagonal scale.
GramResult petersson_gram(const std::vector<QExpansion>& forms, int order = 20, double tol = 1e-9);

/// Orthonormal basis {f'_i = sum_j T_ij f_j} of S_2(Gamma_0(N)).
struct CuspFormBasis {
    int level = 0;
    int genus = 0;
    std::vector<QExpansion> forms;  // the newforms the basis is built from
    Eigen::MatrixXcd transform;     // T, lower triangular: inverse Cholesky factor
    GramResult gram_log;            // Gram matrix before orthonormalization
    nlohmann::json provenance;

    /// f'_i(z) for the orthonormal basis.
    std::vector<cplx> values(const HPoint& z) const;
};

/// Cholesky G = L L^*, T = L^{-1}. Throws gram-not-positive-definite.
CuspFormBasis orthonormalize(const std::vector<QExpansion>& forms, const GramResult& gram);

/// Requires genus >= 2 (throws Data/genus-too-small otherwise).
CuspFormBasis build_basis(const std::vector<QExpansion>& forms, int order = 20);

/// Gram matrix of an already orthonormalized basis (for the idempotence check).
Eigen::MatrixXcd basis_gram(const CuspFormBasis& basis, int order = 20);

/// B_X(z) = y^2 sum_j |f'_j(z)|^2.
double bergman_kernel(const CuspFormBasis& basis, const HPoint& z);

/// mu_can / mu_shyp at z: vol_hyp(X) * B_X(z) / g.
double canonical_density_ratio(const CuspFormBasis& basis, const SurfaceGeometry& geom, const HPoint& z);

/// Serialized basis with the Gram log, the transform and provenance.
nlohmann::json basis_to_json(const CuspFormBasis& basis);

/// Rebuilds a basis from its JSON artifact and the matching newforms; throws
/// schema-mismatch when labels or truncations differ.
CuspFormBasis basis_from_json(const nlohmann::json& doc, const std::vector<QExpansion>& forms);

/// Deterministic points spread over the cells: `count` points of F taken
/// from a Halton sequence (heights up to y_max) and assigned to cells round robin.
std::vector<HPoint> cell_grid_points(int N, int count, double y_max = 2.0);

}  // namespace hyperbergman

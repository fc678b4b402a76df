#pragma once

#include <optional>

#include <nlohmann/json.hpp>

#include "hyperbergman/fuchsian.hpp"

namespace hyperbergman {

/// B_X = 48/pi + 4 / (3 pi sinh^2(r/4)), the uniform bound on the Bergman kernel
/// of a surface with injectivity radius r.
double bx_closed_form(double r);

/// log sinh(x) for x > 0, exact for small x and overflow-free for large x.
double log_sinh(double x);

/// (4 / 3pi) * sum over the ball of e^{-rho} / cosh^2(rho/2). Needs a complete ball with z1 = z2.
double pointwise_orbit_bound(const OrbitBall& ball);

/// (16 / 3pi) * sum over the ball of e^{-2 rho}; dominates pointwise_orbit_bound termwise.
double looser_orbit_bound(const OrbitBall& ball);

/// I(rho) = integral_rho^inf u e^{-u/2} / sqrt(cosh u - cosh rho) du, by quadrature.
double kernel_orbit_integral(double rho);

/// (sqrt 2 / 3pi) * sum of I(rho) / cosh^2(rho/2), the orbit sum before the
/// estimate I(rho) <= 2 sqrt(2) e^{-rho} is applied. That estimate fails for
/// rho > ~0.2 (I(rho) ~ 2 sqrt(2) rho e^{-rho}), so this sum is reported next
/// to the chain rather than as part of it.
double integral_orbit_bound(const OrbitBall& ball);

struct TailBoundParams {
    double delta = 0.0;
    double r = 0.0;
};

/// Right-hand side of the counting-function tail inequality for f(rho) = e^{-2 rho}:
///   term1 = sum of f over the atoms with rho <= delta,
///   term2 = f(delta) sinh(r/2) sinh(delta) / sinh^2(r/4),
///   term3 = (1 / (2 sinh^2(r/4))) * integral_delta^inf f(rho) sinh(rho + r/2) drho.
struct TailTerms {
    double term1 = 0.0;
    double term2 = 0.0;
    double term3 = 0.0;
    double sum() const { return term1 + term2 + term3; }
};

/// Closed form of integral_delta^inf e^{-2 rho} sinh(rho + r/2) drho
/// = (e^{r/2} e^{-delta} - e^{-r/2} e^{-3 delta} / 3) / 2.
double tail_integral_closed_form(double r, double delta);

/// The profile must be an atom profile (or any profile whose thresholds
/// include every jump) complete up to delta. Throws delta-too-small when
/// delta <= r/2.
TailTerms jl_tail_bound(const TailBoundParams& params, const CountProfile& profile);

/// Relaxations of the scaled second and third terms at delta = 3r/4:
/// 128 e^{-r/2} / 3pi and 4 e^{-r/4} / (3pi sinh^2(r/4)).
double relaxed_second_term(double r);
double relaxed_third_term(double r);

struct BoundReport {
    double r = 0.0;
    double delta = 0.0;
    double closed_form_B = 0.0;
    double integral_bound = 0.0;  // 0 unless requested
    double pointwise_bound = 0.0;
    double looser_bound = 0.0;
    TailTerms terms;              // unscaled
    double assembled = 0.0;       // (16 / 3pi) * terms.sum()
    double relaxed2 = 0.0;
    double relaxed3 = 0.0;
    std::optional<HPoint> point;
    std::size_t ball_size = 0;
    double ball_radius = 0.0;

    /// pointwise <= looser <= assembled <= closed form (+ slack).
    bool chain_holds(double slack = 1e-9) const;
    double chain_margin() const { return closed_form_B - assembled; }
};

/// Evaluates the whole chain at the base point of a complete ball with
/// z1 = z2, using delta = 3r/4 unless given. The ball radius must be >= delta.
BoundReport assemble_theorem21(const OrbitBall& ball, const SurfaceGeometry& geom,
                               std::optional<double> delta = std::nullopt, bool with_integral = false);

/// Report for a bare radius: the identity-only profile.
BoundReport closed_form_report(double r);

nlohmann::json to_json(const BoundReport& report);

}  // namespace hyperbergman

#include "hyperbergman/bounds.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "hyperbergman/format.hpp"

namespace hyperbergman {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;

void require_radius(double r) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw Error(ErrorKind::Usage, "nonpositive-radius", "injectivity radius must be positive and finite");
}

void require_base_ball(const OrbitBall& ball) {
    if (!ball.complete) throw Error(ErrorKind::Usage, "incomplete-ball", "orbit bound needs a complete ball");
    if (!(ball.z1 == ball.z2))
        throw Error(ErrorKind::Usage, "mismatched-basepoints", "orbit bound needs z1 = z2");
}

// cosh(x) >= 1 is never the overflow risk here; log cosh keeps large x finite.
double log_cosh(double x) {
    x = std::abs(x);
    if (x > 30.0) return x - kLn2 + std::log1p(std::exp(-2.0 * x));
    return std::log(std::cosh(x));
}

}  // namespace

double log_sinh(double x) {
    if (!(x > 0.0)) throw Error(ErrorKind::Usage, "nonpositive-radius", "log_sinh needs x > 0");
    if (x > 30.0) return x - kLn2 + std::log1p(-std::exp(-2.0 * x));
    return std::log(std::sinh(x));
}

double bx_closed_form(double r) {
    require_radius(r);
    return 48.0 / kPi + 4.0 / (3.0 * kPi) * std::exp(-2.0 * log_sinh(r / 4.0));
}

double pointwise_orbit_bound(const OrbitBall& ball) {
    require_base_ball(ball);
    double sum = 0.0;
    for (const auto& rec : ball.records) sum += std::exp(-rec.rho - 2.0 * log_cosh(rec.rho / 2.0));
    return 4.0 / (3.0 * kPi) * sum;
}

double looser_orbit_bound(const OrbitBall& ball) {
    require_base_ball(ball);
    double sum = 0.0;
    for (const auto& rec : ball.records) sum += std::exp(-2.0 * rec.rho);
    return 16.0 / (3.0 * kPi) * sum;
}

double kernel_orbit_integral(double rho) {
    if (!(rho >= 0.0) || !std::isfinite(rho))
        throw Error(ErrorKind::Usage, "invalid-radius", "orbit integral needs a finite rho >= 0");
    // u = rho + t^2 removes the inverse square root at the lower end, and
    // cosh u - cosh rho = 2 sinh(rho + t^2/2) sinh(t^2/2) avoids cancellation.
    auto integrand = [rho](double t) {
        const double s = 0.5 * t * t;
        const double u = rho + t * t;
        const double a = rho + s;
        if (a <= 0.0) return 0.0;
        double t_over_root;  // t / sqrt(sinh s)
        if (s < 1e-16)
            t_over_root = std::numbers::sqrt2;
        else
            t_over_root = t * std::exp(-0.5 * log_sinh(s));
        return 2.0 * u * t_over_root * std::exp(-0.5 * u - 0.5 * (kLn2 + log_sinh(a)));
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0;
    const double value = integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-12, &err);
    if (!(err <= 1e-9 * std::max(1.0, std::abs(value))) && !(value < 1e-280))
        throw Error(ErrorKind::Numerical, "quadrature-nonconvergent", "orbit integral did not converge");
    return value;
}

double integral_orbit_bound(const OrbitBall& ball) {
    require_base_ball(ball);
    double sum = 0.0;
    for (const auto& rec : ball.records)
        sum += kernel_orbit_integral(rec.rho) * std::exp(-2.0 * log_cosh(rec.rho / 2.0));
    return std::numbers::sqrt2 / (3.0 * kPi) * sum;
}

double tail_integral_closed_form(double r, double delta) {
    require_radius(r);
    // exp(r/2 - delta) / 2 * (1 - e^{-r - 2 delta} / 3)
    return 0.5 * std::exp(0.5 * r - delta) * (1.0 - std::exp(-r - 2.0 * delta) / 3.0);
}

TailTerms jl_tail_bound(const TailBoundParams& params, const CountProfile& profile) {
    const double r = params.r;
    const double delta = params.delta;
    require_radius(r);
    if (!(delta > r / 2.0) || !std::isfinite(delta))
        throw Error(ErrorKind::Usage, "delta-too-small", "the tail inequality needs delta > r/2");

    TailTerms t;
    // Stieltjes sum of e^{-2 rho} against the step function N(rho).
    std::size_t prev = 0;
    for (std::size_t i = 0; i < profile.thresholds.size(); ++i) {
        if (profile.thresholds[i] > delta) break;
        t.term1 += static_cast<double>(profile.counts[i] - prev) * std::exp(-2.0 * profile.thresholds[i]);
        prev = profile.counts[i];
    }
    const double ls4 = log_sinh(r / 4.0);
    t.term2 = std::exp(-2.0 * delta + log_sinh(r / 2.0) + log_sinh(delta) - 2.0 * ls4);
    // (1 / (2 sinh^2(r/4))) * closed form, assembled in log space.
    t.term3 = std::exp(0.5 * r - delta - 2.0 * kLn2 - 2.0 * ls4) * (1.0 - std::exp(-r - 2.0 * delta) / 3.0);
    return t;
}

double relaxed_second_term(double r) {
    require_radius(r);
    return 128.0 / (3.0 * kPi) * std::exp(-0.5 * r);
}

double relaxed_third_term(double r) {
    require_radius(r);
    return 4.0 / (3.0 * kPi) * std::exp(-0.25 * r - 2.0 * log_sinh(r / 4.0));
}

bool BoundReport::chain_holds(double slack) const {
    return pointwise_bound <= looser_bound + slack && looser_bound <= assembled + slack &&
           assembled <= closed_form_B + slack;
}

BoundReport assemble_theorem21(const OrbitBall& ball, const SurfaceGeometry& geom, std::optional<double> delta,
                               bool with_integral) {
    require_base_ball(ball);
    BoundReport rep;
    rep.r = geom.injectivity_radius;
    require_radius(rep.r);
    rep.delta = delta.value_or(0.75 * rep.r);
    if (ball.radius + 1e-12 < rep.delta)
        throw Error(ErrorKind::Usage, "threshold-exceeds-radius", "ball radius is below delta");
    rep.closed_form_B = bx_closed_form(rep.r);
    rep.pointwise_bound = pointwise_orbit_bound(ball);
    rep.looser_bound = looser_orbit_bound(ball);
    if (with_integral) rep.integral_bound = integral_orbit_bound(ball);
    rep.terms = jl_tail_bound({rep.delta, rep.r}, atom_profile(ball));
    rep.assembled = 16.0 / (3.0 * kPi) * rep.terms.sum();
    rep.relaxed2 = relaxed_second_term(rep.r);
    rep.relaxed3 = relaxed_third_term(rep.r);
    rep.point = ball.z1;
    rep.ball_size = ball.records.size();
    rep.ball_radius = ball.radius;
    return rep;
}

BoundReport closed_form_report(double r) {
    BoundReport rep;
    require_radius(r);
    rep.r = r;
    rep.delta = 0.75 * r;
    rep.closed_form_B = bx_closed_form(r);
    rep.pointwise_bound = 4.0 / (3.0 * kPi);
    rep.looser_bound = 16.0 / (3.0 * kPi);
    CountProfile identity_only{{0.0}, {1}};
    rep.terms = jl_tail_bound({rep.delta, r}, identity_only);
    rep.assembled = 16.0 / (3.0 * kPi) * rep.terms.sum();
    rep.relaxed2 = relaxed_second_term(r);
    rep.relaxed3 = relaxed_third_term(r);
    return rep;
}

nlohmann::json to_json(const BoundReport& rep) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["r"] = rep.r;
    j["delta"] = rep.delta;
    j["closed_form_B"] = rep.closed_form_B;
    if (rep.integral_bound > 0.0) {
        j["integral_orbit_bound"] = rep.integral_bound;
        j["integral_below_pointwise"] = rep.integral_bound <= rep.pointwise_bound;
    }
    j["pointwise_orbit_bound"] = rep.pointwise_bound;
    j["looser_orbit_bound"] = rep.looser_bound;
    const double scale = 16.0 / (3.0 * kPi);
    j["terms"] = {
        {"truncated_sum", scale * rep.terms.term1},
        {"boundary_term", scale * rep.terms.term2},
        {"tail_integral_term", scale * rep.terms.term3},
    };
    j["assembled"] = rep.assembled;
    j["relaxed"] = {{"boundary_term", rep.relaxed2}, {"tail_integral_term", rep.relaxed3}};
    j["chain_holds"] = rep.chain_holds();
    j["margin"] = rep.chain_margin();
    if (rep.point) j["point"] = {rep.point->x(), rep.point->y()};
    if (rep.ball_size > 0) {
        j["ball_size"] = rep.ball_size;
        j["ball_radius"] = rep.ball_radius;
    }
    return j;
}

}  // namespace hyperbergman

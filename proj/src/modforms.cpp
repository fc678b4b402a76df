#include "hyperbergman/modforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "hyperbergman/error.hpp"
#include "hyperbergman/format.hpp"
#include "hyperbergman/numtheory.hpp"

namespace hyperbergman {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Deligne gives |a_n| <= d(n) sqrt(n) <= 2n, so the tail after m terms is at
// most sum_{n > m} 2 n x^n with x = |q|.
double tail_bound(int m, double x) {
    const double mm = m;
    return 2.0 * std::pow(x, mm + 1.0) * ((mm + 1.0) - mm * x) / ((1.0 - x) * (1.0 - x));
}

// Number of terms after which the tail drops below `target`, capped at M.
int terms_needed(int M, double x, double target) {
    if (tail_bound(M, x) > target) return M;
    int lo = 1, hi = M;
    while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (tail_bound(mid, x) <= target)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

struct SeriesSums {
    std::vector<cplx> values;
    std::vector<double> abs_sums;
    int terms = 0;
    double tail = 0.0;
    double x = 0.0;
};

// Sums every form at u with a shared power table; `tol` is the target for the
// tail at u, all forms are truncated at the same number of terms.
SeriesSums sum_series(const std::vector<const QExpansion*>& forms, const HPoint& u, double tol) {
    int M = forms.front()->truncation();
    for (const auto* f : forms) M = std::min(M, f->truncation());
    SeriesSums out;
    out.x = std::exp(-kTwoPi * u.y());
    out.terms = terms_needed(M, out.x, 1e-3 * tol);
    out.tail = tail_bound(out.terms, out.x);
    const cplx q = std::exp(cplx(0.0, kTwoPi) * u.z());
    out.values.assign(forms.size(), cplx(0.0));
    out.abs_sums.assign(forms.size(), 0.0);
    cplx p = q;
    for (int n = 0; n < out.terms; ++n) {
        for (std::size_t j = 0; j < forms.size(); ++j) {
            const cplx t = forms[j]->a[n] * p;
            out.values[j] += t;
            out.abs_sums[j] += std::abs(t);
        }
        p *= q;
    }
    return out;
}

double rounding_allowance(double abs_sum, int terms) {
    return 4.0 * std::numeric_limits<double>::epsilon() * (terms + 4) * abs_sum;
}

}  // namespace

QExpansion qexpansion_from_record(const NewformRecord& rec) {
    if (rec.coefficients.empty() || std::abs(rec.coefficients[0] - cplx(1.0)) > 1e-9)
        throw Error(ErrorKind::Data, "schema-mismatch", rec.label + ": a_1 is not 1");
    for (std::size_t i = 0; i < rec.coefficients.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double bound = nt::divisor_count(static_cast<std::int64_t>(i + 1)) * std::sqrt(n) + 1e-6;
        if (!(std::abs(rec.coefficients[i]) <= bound))
            throw Error(ErrorKind::Data, "schema-mismatch",
                        rec.label + ": a_" + std::to_string(i + 1) + " violates the Deligne bound");
    }
    QExpansion f;
    f.level = rec.level;
    f.label = rec.label;
    f.a = rec.coefficients;
    f.fricke_sign = rec.atkin_lehner_sign;
    if (f.fricke_sign != 1 && f.fricke_sign != -1) f.fricke_sign = infer_fricke_sign(f);
    return f;
}

FormValue q_series(const QExpansion& f, const HPoint& z, double tol) {
    const auto s = sum_series({&f}, z, tol);
    if (s.tail > tol)
        throw Error(ErrorKind::Numerical, "truncation-insufficient",
                    f.label + ": tail bound " + shortest_repr(s.tail) + " at " + to_string(z) + " with " +
                        std::to_string(f.truncation()) + " coefficients");
    return {s.values[0], s.tail + rounding_allowance(s.abs_sums[0], s.terms)};
}


ReducedPoint reduce_for_level(int N, const HPoint& z) {
    const auto red = reduce_to_fundamental_domain(z);
    const SL2Z g = inverse(red.gamma);  // z = g w
    const cplx w = red.w.z();
    ReducedPoint out;
    if (nt::mod(g.c, N) == 0) {
        out.u = red.w;
        out.base = static_cast<double>(g.c) * w + static_cast<double>(g.d);
        return out;
    }
    // With k = d/c mod N, g T^-k S lies in Gamma_0(N) and has bottom row
    // (D, -C) up to the scaling by N, so z = delta(-1/(N u)) for u = (w + k)/N.
    const std::int64_t k = nt::mod(nt::mod(g.d, N) * nt::inverse_mod(nt::mod(g.c, N), N), N);
    const double C = static_cast<double>(g.c * k - g.d);
    const double D = static_cast<double>(g.c);
    const double Nd = N;
    out.u = HPoint((red.w.x() + static_cast<double>(k)) / Nd, red.w.y() / Nd);
    out.fricke = true;
    out.base = D * out.u.z() - C / Nd;
    return out;
}

cplx ReducedPoint::factor(int N, int fricke_sign) const {
    const cplx b2 = base * base;
    return fricke ? static_cast<double>(fricke_sign * N) * b2 : b2;
}

namespace {

std::vector<FormValue> evaluate_reduced(const std::vector<const QExpansion*>& forms, const HPoint& z, double tol) {
    const int N = forms.front()->level;
    const ReducedPoint r = reduce_for_level(N, z);
    // y |f(z)| = Im(u) |f(u)|, so the tolerance at u is tol / Im(u).
    const double tol_u = tol / r.u.y();
    const auto s = sum_series(forms, r.u, tol_u);
    if (s.tail > tol_u)
        throw Error(ErrorKind::Numerical, "truncation-insufficient",
                    "level " + std::to_string(N) + ": tail bound " + shortest_repr(s.tail * r.u.y()) + " at " +
                        to_string(z));
    std::vector<FormValue> out;
    out.reserve(forms.size());
    for (std::size_t j = 0; j < forms.size(); ++j) {
        const cplx factor = r.factor(N, forms[j]->fricke_sign);
        const double err_u = s.tail + rounding_allowance(s.abs_sums[j], s.terms);
        out.push_back({factor * s.values[j], std::abs(factor) * err_u * (1.0 + 1e-15)});
    }
    return out;
}

}  // namespace

FormValue evaluate_form(const QExpansion& f, const HPoint& z, double tol) {
    return evaluate_reduced({&f}, z, tol).front();
}

std::vector<FormValue> evaluate_forms(const std::vector<QExpansion>& forms, const HPoint& z, double tol) {
    if (forms.empty()) return {};
    std::vector<const QExpansion*> ptrs;
    for (const auto& f : forms) {
        if (f.level != forms.front().level)
            throw Error(ErrorKind::Usage, "mixed-levels", "forms passed together must share a level");
        ptrs.push_back(&f);
    }
    return evaluate_reduced(ptrs, z, tol);
}

int infer_fricke_sign(const QExpansion& f) {
    const double N = f.level;
    double best_residual = 0.0;
    int best = 0;
    for (int eps : {1, -1}) {
        double residual = 0.0, scale = 0.0;
        for (double x : {0.07, 0.19, 0.31}) {
            const HPoint z(x, 1.3 / std::sqrt(N));
            const cplx zz = z.z();
            const HPoint wz = HPoint::from_complex(-1.0 / (N * zz));
            const cplx lhs = q_series(f, wz, 1e-9).value;
            const cplx rhs = static_cast<double>(eps) * N * zz * zz * q_series(f, z, 1e-9).value;
            residual += std::abs(lhs - rhs);
            scale += std::abs(lhs) + std::abs(rhs);
        }
        const double rel = residual / std::max(scale, 1e-300);
        if (best == 0 || rel < best_residual) {
            best_residual = rel;
            best = eps;
        }
    }
    if (best_residual > 1e-6)
        throw Error(ErrorKind::Data, "fricke-sign-undetermined",
                    f.label + ": neither sign satisfies the Fricke relation (residual " + shortest_repr(best_residual) +
                        ")");
    return best;
}

// ---------------------------------------------------------------------------
// Quadrature

std::size_t CellDecomposition::node_count() const {
    std::size_t n = 0;
    for (const auto& c : nodes) n += c.size();
    return n;
}

namespace {

struct Rule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

template <unsigned P>
Rule boost_rule() {
    using G = boost::math::quadrature::gauss<double, P>;
    Rule r;
    const auto& ab = G::abscissa();
    const auto& wt = G::weights();
    for (std::size_t i = 0; i < ab.size(); ++i) {
        if (ab[i] == 0.0) {
            r.x.push_back(0.0);
            r.w.push_back(wt[i]);
        } else {
            r.x.push_back(ab[i]);
            r.w.push_back(wt[i]);
            r.x.push_back(-ab[i]);
            r.w.push_back(wt[i]);
        }
    }
    return r;
}

Rule gauss_rule(int order) {
    switch (order) {
    case 10: return boost_rule<10>();
    case 15: return boost_rule<15>();
    case 20: return boost_rule<20>();
    case 25: return boost_rule<25>();
    case 30: return boost_rule<30>();
    default:
        throw Error(ErrorKind::Usage, "unsupported-order",
                    "quadrature order " + std::to_string(order) + " (use 10, 15, 20, 25 or 30)");
    }
}

// Nodes for integral over F of g dx dy / y^2 where g decays like e^{-lambda y}.
std::vector<QuadratureNode> domain_nodes(const Rule& rule, double lambda) {
    std::vector<QuadratureNode> out;
    const double y_top = 1.0 + 40.0 / lambda;
    for (auto [x0, x1] : {std::pair{-0.5, 0.0}, std::pair{0.0, 0.5}}) {
        const double hx = 0.5 * (x1 - x0);
        for (std::size_t i = 0; i < rule.x.size(); ++i) {
            const double x = x0 + hx * (rule.x[i] + 1.0);
            const double wx = hx * rule.w[i];
            // Panels from the arc up to 1, then doubling widths up to y_top.
            std::vector<double> breaks{std::sqrt(1.0 - x * x), 1.0};
            double width = 0.25;
            while (breaks.back() < y_top) {
                breaks.push_back(std::min(y_top, breaks.back() + width));
                width *= 2.0;
            }
            for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
                const double hy = 0.5 * (breaks[p + 1] - breaks[p]);
                for (std::size_t j = 0; j < rule.x.size(); ++j) {
                    const double y = breaks[p] + hy * (rule.x[j] + 1.0);
                    out.push_back({HPoint(x, y), wx * hy * rule.w[j] / (y * y)});
                }
            }
            // [y_top, inf) in s = 1/y: dy / y^2 = ds.
            const double hs = 0.5 / y_top;
            for (std::size_t j = 0; j < rule.x.size(); ++j) {
                const double s = hs * (rule.x[j] + 1.0);
                out.push_back({HPoint(x, 1.0 / s), wx * hs * rule.w[j]});
            }
        }
    }
    return out;
}

}  // namespace

CellDecomposition make_cells(int N, int order) {
    if (!nt::is_prime(N)) throw Error(ErrorKind::Usage, "non-prime-level", "level must be prime");
    const Rule rule = gauss_rule(order);
    CellDecomposition cells;
    cells.level = N;
    cells.order = order;
    const auto at_infinity = domain_nodes(rule, 4.0 * std::numbers::pi);
    const auto at_zero = domain_nodes(rule, 4.0 * std::numbers::pi / N);
    for (int k = 0; k <= N; ++k) {
        cells.cosets.push_back(gamma0_coset_rep(k));
        cells.nodes.push_back(k == 0 ? at_infinity : at_zero);
    }
    return cells;
}

double integrate(const CellDecomposition& cells, const std::function<double(const HPoint&)>& phi) {
    double total = 0.0;
    for (std::size_t c = 0; c < cells.cell_count(); ++c) {
        const Mobius rho = cells.cosets[c].to_mobius();
        double cell_sum = 0.0;
        for (const auto& node : cells.nodes[c]) cell_sum += node.weight * phi(mobius_apply(rho, node.w));
        total += cell_sum;
    }
    return total;
}

double quadrature_area(const CellDecomposition& cells) {
    return integrate(cells, [](const HPoint&) { return 1.0; });
}

namespace {

Eigen::MatrixXcd gram_at(const std::vector<QExpansion>& forms, const CellDecomposition& cells,
                         const Eigen::MatrixXcd* transform) {
    const auto g = static_cast<Eigen::Index>(forms.size());
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(g, g);
    Eigen::VectorXcd v(g);
    for (std::size_t c = 0; c < cells.cell_count(); ++c) {
        const Mobius rho = cells.cosets[c].to_mobius();
        for (const auto& node : cells.nodes[c]) {
            const HPoint z = mobius_apply(rho, node.w);
            const auto vals = evaluate_forms(forms, z, 1e-13);
            for (Eigen::Index j = 0; j < g; ++j) v[j] = vals[static_cast<std::size_t>(j)].value * z.y();
            if (transform) v = (*transform) * v;
            for (Eigen::Index i = 0; i < g; ++i)
                for (Eigen::Index j = i; j < g; ++j) G(i, j) += node.weight * v[i] * std::conj(v[j]);
        }
    }
    for (Eigen::Index i = 0; i < g; ++i) {
        G(i, i) = cplx(G(i, i).real(), 0.0);
        for (Eigen::Index j = i + 1; j < g; ++j) G(j, i) = std::conj(G(i, j));
    }
    return G;
}

int companion_order(int order) { return order >= 30 ? 25 : std::min(30, order + 10); }

}  // namespace

GramResult petersson_gram(const std::vector<QExpansion>& forms, int order, double tol) {
    if (forms.empty()) throw Error(ErrorKind::Usage, "empty-basis", "no forms to pair");
    const int N = forms.front().level;
    const int hi = std::max(order, companion_order(order));
    const int lo = std::min(order, companion_order(order));
    const Eigen::MatrixXcd G_lo = gram_at(forms, make_cells(N, lo), nullptr);
    const Eigen::MatrixXcd G_hi = gram_at(forms, make_cells(N, hi), nullptr);
    GramResult out;
    out.gram = G_hi;
    out.error = (G_hi - G_lo).cwiseAbs();
    out.order = hi;
    const double scale = G_hi.diagonal().real().maxCoeff();
    if (out.error.maxCoeff() > tol * scale)
        throw Error(ErrorKind::Numerical, "quadrature-nonconvergent",
                    "level " + std::to_string(N) + ": Gram error estimate " + shortest_repr(out.error.maxCoeff()) +
                        " exceeds " + shortest_repr(tol * scale));
    return out;
}

std::vector<cplx> CuspFormBasis::values(const HPoint& z) const {
    const auto vals = evaluate_forms(forms, z);
    Eigen::VectorXcd v(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t j = 0; j < vals.size(); ++j) v[static_cast<Eigen::Index>(j)] = vals[j].value;
    const Eigen::VectorXcd w = transform * v;
    return {w.data(), w.data() + w.size()};
}

CuspFormBasis orthonormalize(const std::vector<QExpansion>& forms, const GramResult& gram) {
    const Eigen::Index g = gram.gram.rows();
    if (gram.gram.cols() != g || static_cast<std::size_t>(g) != forms.size())
        throw Error(ErrorKind::Usage, "shape-mismatch", "Gram matrix does not match the number of forms");
    Eigen::LLT<Eigen::MatrixXcd> llt(gram.gram);
    const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(gram.gram).eigenvalues();
    if (llt.info() != Eigen::Success || eig.minCoeff() <= 1e-10 * std::max(1.0, eig.maxCoeff()))
        throw Error(ErrorKind::Numerical, "gram-not-positive-definite",
                    "smallest Gram eigenvalue " + shortest_repr(eig.minCoeff()));
    CuspFormBasis basis;
    basis.level = forms.empty() ? 0 : forms.front().level;
    basis.genus = static_cast<int>(g);
    basis.forms = forms;
    const Eigen::MatrixXcd L = llt.matrixL();
    basis.transform = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXcd::Identity(g, g));
    basis.gram_log = gram;
    nlohmann::json labels = nlohmann::json::array();
    for (const auto& f : forms) labels.push_back(f.label);
    basis.provenance = {{"labels", labels},
                        {"truncation", forms.empty() ? 0 : forms.front().truncation()},
                        {"quadrature_order", gram.order},
                        {"max_gram_error", gram.error.size() ? gram.error.maxCoeff() : 0.0}};
    return basis;
}

CuspFormBasis build_basis(const std::vector<QExpansion>& forms, int order) {
    if (forms.size() < 2)
        throw Error(ErrorKind::Data, "genus-too-small",
                    "need at least two cusp forms, got " + std::to_string(forms.size()));
    return orthonormalize(forms, petersson_gram(forms, order));
}

Eigen::MatrixXcd basis_gram(const CuspFormBasis& basis, int order) {
    return gram_at(basis.forms, make_cells(basis.level, order), &basis.transform);
}

double bergman_kernel(const CuspFormBasis& basis, const HPoint& z) {
    double s = 0.0;
    for (const auto& v : basis.values(z)) s += std::norm(v);
    return z.y() * z.y() * s;
}

double canonical_density_ratio(const CuspFormBasis& basis, const SurfaceGeometry& geom, const HPoint& z) {
    if (basis.genus < 1) throw Error(ErrorKind::Usage, "empty-basis", "basis has no forms");
    return geom.hyp_volume * bergman_kernel(basis, z) / basis.genus;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXcd matrix_from_json(const nlohmann::json& rows, Eigen::Index n) {
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n)
        throw Error(ErrorKind::Data, "schema-mismatch", "matrix has the wrong shape");
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            throw Error(ErrorKind::Data, "schema-mismatch", "matrix has the wrong shape");
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto& e = row[static_cast<std::size_t>(j)];
            m(i, j) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
        }
    }
    return m;
}

}  // namespace

nlohmann::json basis_to_json(const CuspFormBasis& basis) {
    nlohmann::json err = nlohmann::json::array();
    for (Eigen::Index i = 0; i < basis.gram_log.error.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < basis.gram_log.error.cols(); ++j) row.push_back(basis.gram_log.error(i, j));
        err.push_back(row);
    }
    nlohmann::json labels = nlohmann::json::array();
    for (const auto& f : basis.forms) labels.push_back(f.label);
    return {{"schema_version", 1},
            {"level", basis.level},
            {"genus", basis.genus},
            {"labels", labels},
            {"truncation", basis.forms.empty() ? 0 : basis.forms.front().truncation()},
            {"quadrature_order", basis.gram_log.order},
            {"gram", matrix_to_json(basis.gram_log.gram)},
            {"gram_error", err},
            {"transform", matrix_to_json(basis.transform)},
            {"provenance", basis.provenance}};
}

CuspFormBasis basis_from_json(const nlohmann::json& doc, const std::vector<QExpansion>& forms) {
    try {
        if (doc.at("schema_version").get<int>() != 1)
            throw Error(ErrorKind::Data, "schema-mismatch", "unsupported basis schema version");
        const auto labels = doc.at("labels").get<std::vector<std::string>>();
        if (labels.size() != forms.size())
            throw Error(ErrorKind::Data, "schema-mismatch", "basis artifact lists a different number of forms");
        for (std::size_t i = 0; i < forms.size(); ++i)
            if (labels[i] != forms[i].label || doc.at("truncation").get<int>() != forms[i].truncation())
                throw Error(ErrorKind::Data, "schema-mismatch", "basis artifact does not match form " + forms[i].label);
        const auto g = static_cast<Eigen::Index>(forms.size());
        CuspFormBasis basis;
        basis.level = doc.at("level").get<int>();
        basis.genus = doc.at("genus").get<int>();
        basis.forms = forms;
        basis.transform = matrix_from_json(doc.at("transform"), g);
        basis.gram_log.gram = matrix_from_json(doc.at("gram"), g);
        basis.gram_log.order = doc.at("quadrature_order").get<int>();
        basis.gram_log.error = Eigen::MatrixXd::Zero(g, g);
        const auto& err = doc.at("gram_error");
        for (Eigen::Index i = 0; i < g; ++i)
            for (Eigen::Index j = 0; j < g; ++j)
                basis.gram_log.error(i, j) = err.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j)).get<double>();
        basis.provenance = doc.at("provenance");
        return basis;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Data, "schema-mismatch", std::string("basis artifact: ") + e.what());
    }
}

std::vector<HPoint> cell_grid_points(int N, int count, double y_max) {
    auto halton = [](int i, int base) {
        double f = 1.0, r = 0.0;
        while (i > 0) {
            f /= base;
            r += f * (i % base);
            i /= base;
        }
        return r;
    };
    std::vector<HPoint> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double x = halton(i + 1, 2) - 0.5;
        const double y0 = std::sqrt(1.0 - x * x);
        const double y = y0 + (y_max - y0) * halton(i + 1, 3);
        const SL2Z rho = gamma0_coset_rep(i % (N + 1));
        out.push_back(mobius_apply(rho.to_mobius(), HPoint(x, y)));
    }
    return out;
}

}  // namespace hyperbergman

#include "hyperbergman/modsym.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "hyperbergman/error.hpp"
#include "hyperbergman/numtheory.hpp"

namespace hyperbergman::modsym {

namespace {

using Rational = boost::multiprecision::cpp_rational;

// Reduced row echelon form in place; returns pivot column of each nonzero row.
std::vector<std::size_t> rref(std::vector<std::vector<Rational>>& m, std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
        std::size_t sel = row;
        while (sel < m.size() && m[sel][col] == 0) ++sel;
        if (sel == m.size()) continue;
        std::swap(m[row], m[sel]);
        const Rational inv = 1 / m[row][col];
        for (auto& v : m[row]) v *= inv;
        for (std::size_t r = 0; r < m.size(); ++r) {
            if (r == row || m[r][col] == 0) continue;
            const Rational f = m[r][col];
            for (std::size_t c = col; c < cols; ++c) m[r][c] -= f * m[row][c];
        }
        pivots.push_back(col);
        ++row;
    }
    m.resize(row);
    return pivots;
}

}  // namespace

std::vector<Heilbronn> heilbronn_merel(std::int64_t n) {
    if (n < 1) throw Error(ErrorKind::Usage, "invalid-index", "Heilbronn matrices need n >= 1");
    std::vector<Heilbronn> out;
    for (std::int64_t a = 1; a <= n; ++a) {
        const std::int64_t q = n / a;
        if (a * q == n) {
            // c = 0: d = q and 0 <= b < a; b = 0: a d - b c = n with d = q, 0 < c < d.
            for (std::int64_t b = 0; b < a; ++b) out.push_back({a, b, 0, q});
            for (std::int64_t c = 1; c < q; ++c) out.push_back({a, 0, c, q});
        }
        // b, c >= 1: then d > q, and bc = ad - n with 0 < c < d, 0 < b < a.
        for (std::int64_t d = q + 1; d <= n; ++d) {
            const std::int64_t bc = a * d - n;
            for (std::int64_t c = bc / a + 1; c < d; ++c) {
                if (bc % c == 0) out.push_back({a, bc / c, c, d});
            }
        }
    }
    return out;
}

std::int64_t PlusSpace::index(std::int64_t c, std::int64_t d) const {
    c = nt::mod(c, N_);
    d = nt::mod(d, N_);
    if (c == 0) return d == 0 ? -1 : 0;
    return 1 + nt::mod(d * nt::inverse_mod(c, N_), N_);
}

PlusSpace::PlusSpace(std::int64_t N) : N_(N) {
    if (!nt::is_prime(N)) throw Error(ErrorKind::Usage, "invalid-level", "modular symbols need a prime level");
    const auto n = static_cast<std::size_t>(N + 1);
    auto rep = [](std::size_t i) -> std::pair<std::int64_t, std::int64_t> {
        if (i == 0) return {0, 1};
        return {1, static_cast<std::int64_t>(i) - 1};
    };

    std::vector<std::vector<Rational>> rel;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [c, d] = rep(i);
        std::vector<Rational> row(n, 0);
        row[i] += 1;
        row[static_cast<std::size_t>(index(d, -c))] += 1;  // x S
        rel.push_back(row);

        std::vector<Rational> tri(n, 0);
        tri[i] += 1;
        tri[static_cast<std::size_t>(index(d, -c - d))] += 1;  // x tau
        tri[static_cast<std::size_t>(index(-c - d, c))] += 1;  // x tau^2
        rel.push_back(tri);

        std::vector<Rational> star(n, 0);
        star[i] += 1;
        star[static_cast<std::size_t>(index(-c, d))] -= 1;
        rel.push_back(star);
    }
    const auto pivots = rref(rel, n);

    std::vector<bool> is_pivot(n, false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t j = 0; j < n; ++j)
        if (!is_pivot[j]) free_cols.push_back(j);
    dim_ = static_cast<int>(free_cols.size());
    for (auto f : free_cols) basis_symbols_.push_back(static_cast<std::int64_t>(f));

    std::vector<std::vector<Rational>> image(n, std::vector<Rational>(free_cols.size(), 0));
    for (std::size_t k = 0; k < free_cols.size(); ++k) image[free_cols[k]][k] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r)
        for (std::size_t k = 0; k < free_cols.size(); ++k) image[pivots[r]][k] = -rel[r][free_cols[k]];

    boost::multiprecision::cpp_int den = 1;
    for (const auto& row : image)
        for (const auto& v : row) den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(v));
    denom_ = static_cast<std::int64_t>(den);
    image_.assign(n, std::vector<std::int64_t>(free_cols.size(), 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < free_cols.size(); ++k) {
            const Rational scaled = image[i][k] * Rational(den);
            image_[i][k] = static_cast<std::int64_t>(boost::multiprecision::numerator(scaled));
        }
}

std::vector<double> PlusSpace::hecke_matrix(std::int64_t n) const {
    const auto dim = static_cast<std::size_t>(dim_);
    std::vector<std::int64_t> acc(dim * dim, 0);
    const auto hs = heilbronn_merel(n);
    for (std::size_t col = 0; col < dim; ++col) {
        const auto sym = static_cast<std::size_t>(basis_symbols_[col]);
        const std::int64_t c = sym == 0 ? 0 : 1;
        const std::int64_t d = sym == 0 ? 1 : static_cast<std::int64_t>(sym) - 1;
        for (const auto& h : hs) {
            const std::int64_t j = index(c * h.a + d * h.c, c * h.b + d * h.d);
            if (j < 0) continue;
            const auto& img = image_[static_cast<std::size_t>(j)];
            for (std::size_t row = 0; row < dim; ++row) acc[row * dim + col] += img[row];
        }
    }
    // Basis symbols map to unit vectors, so columns are already coordinates
    // scaled by denom_.
    std::vector<double> out(dim * dim);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(acc[i]) / static_cast<double>(denom_);
    return out;
}

std::string orbit_letters(int index) {
    std::string s;
    do {
        s.insert(s.begin(), static_cast<char>('a' + index % 26));
        index /= 26;
    } while (index > 0);
    return s;
}

std::vector<NewformEmbedding> newforms(std::int64_t N, int M) {
    if (M < 2) throw Error(ErrorKind::Usage, "invalid-truncation", "need at least two coefficients");
    const PlusSpace space(N);
    const int dim = space.dimension();
    const int g = dim - 1;
    if (g != nt::genus_x0_prime(N))
        throw Error(ErrorKind::Numerical, "dimension-mismatch", "plus quotient has unexpected dimension");
    if (g == 0) return {};

    using Mat = Eigen::MatrixXd;
    auto to_eigen = [dim](const std::vector<double>& m) {
        Mat out(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) out(i, j) = m[static_cast<std::size_t>(i * dim + j)];
        return out;
    };

    // Generic combination of small Hecke operators separates the eigenforms.
    const std::vector<std::int64_t> small = {2, 3, 5, 7, 11, 13};
    const std::vector<double> weights = {1.0, 0.371, 0.113, 0.0531, 0.0173, 0.0071};
    Mat T = Mat::Zero(dim, dim);
    for (std::size_t k = 0; k < small.size(); ++k)
        if (small[k] != N) T += weights[k] * to_eigen(space.hecke_matrix(small[k]));

    Eigen::EigenSolver<Mat> right(T);
    Eigen::EigenSolver<Mat> left(T.transpose());
    const Eigen::VectorXcd lr = right.eigenvalues();
    const Eigen::VectorXcd ll = left.eigenvalues();

    const std::int64_t probe = N == 2 ? 3 : 2;
    const Mat Tprobe = to_eigen(space.hecke_matrix(probe));

    struct Form {
        Eigen::VectorXd v, w;
        std::vector<double> ap;  // indexed by n, primes filled first
    };
    std::vector<Form> forms;
    for (int i = 0; i < dim; ++i) {
        if (std::abs(lr[i].imag()) > 1e-8)
            throw Error(ErrorKind::Numerical, "complex-eigenvalue", "Hecke combination has a nonreal eigenvalue");
        int match = -1;
        for (int j = 0; j < dim; ++j)
            if (std::abs(ll[j] - lr[i]) < 1e-7 * std::max(1.0, std::abs(lr[i]))) match = j;
        if (match < 0) throw Error(ErrorKind::Numerical, "eigen-mismatch", "left and right spectra disagree");
        Form f;
        f.v = right.eigenvectors().col(i).real();
        f.w = left.eigenvectors().col(match).real();
        const double lam = f.w.dot(Tprobe * f.v) / f.w.dot(f.v);
        if (std::abs(lam - static_cast<double>(probe + 1)) < 1e-6) continue;  // Eisenstein
        forms.push_back(std::move(f));
    }
    if (static_cast<int>(forms.size()) != g)
        throw Error(ErrorKind::Numerical, "eigen-mismatch", "did not isolate g cuspidal eigenforms");

    const auto primes = nt::primes_up_to(M);
    for (auto& f : forms) f.ap.assign(static_cast<std::size_t>(M) + 1, 0.0);
    for (auto p : primes) {
        const Mat Tp = to_eigen(space.hecke_matrix(p));
        for (auto& f : forms) f.ap[static_cast<std::size_t>(p)] = f.w.dot(Tp * f.v) / f.w.dot(f.v);
    }

    // Galois orbits: smallest sets of forms whose traces of a_p are integers.
    const auto check_primes = nt::primes_up_to(std::min<std::int64_t>(M, 100));
    std::vector<int> orbit_of(forms.size(), -1);
    std::vector<std::vector<std::size_t>> orbits;
    for (std::size_t first = 0; first < forms.size(); ++first) {
        if (orbit_of[first] >= 0) continue;
        std::vector<std::size_t> rest;
        for (std::size_t j = first + 1; j < forms.size(); ++j)
            if (orbit_of[j] < 0) rest.push_back(j);
        std::vector<std::size_t> best;
        for (int size = 0; size <= static_cast<int>(rest.size()) && best.empty(); ++size) {
            for (std::uint64_t mask = 0; mask < (1ULL << rest.size()); ++mask) {
                if (std::popcount(mask) != size) continue;
                std::vector<std::size_t> cand{first};
                for (std::size_t b = 0; b < rest.size(); ++b)
                    if (mask & (1ULL << b)) cand.push_back(rest[b]);
                bool integral = true;
                for (auto p : check_primes) {
                    double tr = 0.0;
                    for (auto k : cand) tr += forms[k].ap[static_cast<std::size_t>(p)];
                    if (std::abs(tr - std::nearbyint(tr)) > 1e-6) integral = false;
                }
                if (integral) {
                    best = cand;
                    break;
                }
            }
        }
        for (auto k : best) orbit_of[k] = static_cast<int>(orbits.size());
        orbits.push_back(best);
    }

    auto trace_key = [&](const std::vector<std::size_t>& orb) {
        std::vector<long long> key{static_cast<long long>(orb.size())};
        for (auto p : check_primes) {
            double tr = 0.0;
            for (auto k : orb) tr += forms[k].ap[static_cast<std::size_t>(p)];
            key.push_back(std::llround(tr));
        }
        return key;
    };
    std::sort(orbits.begin(), orbits.end(),
              [&](const auto& l, const auto& r) { return trace_key(l) < trace_key(r); });

    std::vector<NewformEmbedding> out;
    for (std::size_t o = 0; o < orbits.size(); ++o) {
        auto orb = orbits[o];
        std::sort(orb.begin(), orb.end(), [&](std::size_t l, std::size_t r) {
            for (auto p : check_primes) {
                const double a = forms[l].ap[static_cast<std::size_t>(p)];
                const double b = forms[r].ap[static_cast<std::size_t>(p)];
                if (std::abs(a - b) > 1e-9) return a < b;
            }
            return l < r;
        });
        for (std::size_t e = 0; e < orb.size(); ++e) {
            auto ap = forms[orb[e]].ap;
            if (orb.size() == 1)
                for (auto p : primes) ap[static_cast<std::size_t>(p)] = std::nearbyint(ap[static_cast<std::size_t>(p)]);
            // a_n from a_p: multiplicative, a_{p^{k+1}} = a_p a_{p^k} - p a_{p^{k-1}} for p not dividing N.
            std::vector<double> a(static_cast<std::size_t>(M) + 1, 0.0);
            a[1] = 1.0;
            for (std::int64_t n = 2; n <= M; ++n) {
                std::int64_t p = 2;
                while (n % p != 0) ++p;
                std::int64_t pk = 1, m = n;
                int k = 0;
                while (m % p == 0) {
                    m /= p;
                    pk *= p;
                    ++k;
                }
                double apk;
                if (m > 1) {
                    a[static_cast<std::size_t>(n)] = a[static_cast<std::size_t>(pk)] * a[static_cast<std::size_t>(m)];
                    continue;
                }
                const double app = ap[static_cast<std::size_t>(p)];
                if (k == 1)
                    apk = app;
                else if (p == N)
                    apk = app * a[static_cast<std::size_t>(n / p)];
                else
                    apk = app * a[static_cast<std::size_t>(n / p)] -
                          static_cast<double>(p) * a[static_cast<std::size_t>(n / (p * p))];
                a[static_cast<std::size_t>(n)] = apk;
            }
            NewformEmbedding emb;
            emb.level = N;
            emb.orbit = static_cast<int>(o);
            emb.orbit_dim = static_cast<int>(orb.size());
            emb.embedding = static_cast<int>(e) + 1;
            emb.label = std::to_string(N) + ".2.a." + orbit_letters(static_cast<int>(o)) + ".1." +
                        std::to_string(e + 1);
            const double aN = N <= M ? a[static_cast<std::size_t>(N)] : 0.0;
            if (N <= M && std::abs(std::abs(aN) - 1.0) > 1e-8)
                throw Error(ErrorKind::Numerical, "eigen-mismatch", "a_N is not +-1");
            emb.fricke_sign = N <= M ? -static_cast<int>(std::lround(aN)) : 0;
            emb.coefficients.assign(a.begin() + 1, a.end());
            out.push_back(std::move(emb));
        }
    }
    return out;
}

}  // namespace hyperbergman::modsym

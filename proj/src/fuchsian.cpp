#include "hyperbergman/fuchsian.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <thread>
#include <unordered_map>

#include "hyperbergman/numtheory.hpp"

namespace hyperbergman {

namespace {

constexpr double kTraceTol = 1e-9;

bool is_parabolic(const Mobius& g) {
    return std::abs(std::abs(g.trace()) - 2.0) <= kTraceTol && !(std::abs(g.b()) < 1e-12 && std::abs(g.c()) < 1e-12);
}

bool same_entries(const std::array<double, 4>& s, const std::array<double, 4>& t, double tol) {
    double scale = 1.0;
    for (int i = 0; i < 4; ++i) scale = std::max(scale, std::abs(s[i]));
    for (int i = 0; i < 4; ++i)
        if (std::abs(s[i] - t[i]) > tol * scale) return false;
    return true;
}

// Equality in PSL2: t or -t.
bool near_equal(const Mobius& s, const Mobius& t, double tol) {
    const auto& m = t.entries();
    return same_entries(s.entries(), m, tol) || same_entries(s.entries(), {-m[0], -m[1], -m[2], -m[3]}, tol);
}

std::string inverse_label(const std::string& label) {
    if (label.size() == 1 && std::islower(static_cast<unsigned char>(label[0])))
        return std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(label[0]))));
    if (label.size() == 1 && std::isupper(static_cast<unsigned char>(label[0])))
        return std::string(1, static_cast<char>(std::tolower(static_cast<unsigned char>(label[0]))));
    if (label.size() > 3 && label.ends_with("^-1")) return label.substr(0, label.size() - 3);
    return label + "^-1";
}

// Deduplication grid. Entries are quantized on a fixed grid; a lookup also
// probes the neighbouring cell of every entry that lies close to a cell
// boundary, so drift across a boundary cannot split one transform in two.
constexpr double kKeyGrid = 1e-4;
constexpr double kKeyProbe = 0.25;  // fraction of a cell treated as "near the boundary"
constexpr double kSameTol = 1e-8;   // relative; long words drift well past 1e-11

struct MatrixKey {
    std::array<std::int64_t, 4> q;
    friend bool operator==(const MatrixKey&, const MatrixKey&) = default;
};

struct MatrixKeyHash {
    std::size_t operator()(const MatrixKey& k) const noexcept {
        std::size_t h = 1469598103934665603ULL;
        for (auto v : k.q) {
            h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

MatrixKey key_of(const Mobius& g) {
    MatrixKey k{};
    for (int i = 0; i < 4; ++i) k.q[i] = static_cast<std::int64_t>(std::floor(g.entries()[i] / kKeyGrid));
    return k;
}

std::vector<MatrixKey> probe_keys(const std::array<double, 4>& m) {
    std::array<std::vector<std::int64_t>, 4> cells;
    for (int i = 0; i < 4; ++i) {
        const double t = m[i] / kKeyGrid;
        const double base = std::floor(t);
        const auto b = static_cast<std::int64_t>(base);
        cells[i].push_back(b);
        if (t - base < kKeyProbe) cells[i].push_back(b - 1);
        if (base + 1.0 - t < kKeyProbe) cells[i].push_back(b + 1);
    }
    std::vector<MatrixKey> keys;
    for (auto a : cells[0])
        for (auto b : cells[1])
            for (auto c : cells[2])
                for (auto d : cells[3]) keys.push_back(MatrixKey{{a, b, c, d}});
    return keys;
}

class TransformSet {
public:
    /// Inserts g unless an equal transform is already present.
    bool insert_if_absent(const Mobius& g) {
        // A representative with a ~ 0 may come out with either sign, so the
        // negated matrix is probed as well.
        const auto& m = g.entries();
        const std::array<double, 4> neg{-m[0], -m[1], -m[2], -m[3]};
        for (const auto* probe : {&m, &neg}) {
            for (const auto& key : probe_keys(*probe)) {
                const auto it = buckets_.find(key);
                if (it == buckets_.end()) continue;
                for (auto idx : it->second)
                    if (same_entries(items_[idx].entries(), *probe, kSameTol)) return false;
            }
        }
        buckets_[key_of(g)].push_back(items_.size());
        items_.push_back(g);
        return true;
    }
    std::size_t size() const { return items_.size(); }

private:
    std::unordered_map<MatrixKey, std::vector<std::size_t>, MatrixKeyHash> buckets_;
    std::vector<Mobius> items_;
};

void sort_records(std::vector<OrbitRecord>& records) {
    std::sort(records.begin(), records.end(), [](const OrbitRecord& l, const OrbitRecord& r) {
        if (l.rho != r.rho) return l.rho < r.rho;
        if (l.word.size() != r.word.size()) return l.word.size() < r.word.size();
        return l.word < r.word;
    });
}

// Merges records that are the same transform but landed in different
// quantization buckets. Records are sorted by rho, so duplicates are close.
std::size_t duplicate_audit(std::vector<OrbitRecord>& records) {
    std::vector<OrbitRecord> kept;
    kept.reserve(records.size());
    std::size_t merged = 0;
    for (auto& rec : records) {
        bool dup = false;
        for (auto it = kept.rbegin(); it != kept.rend() && rec.rho - it->rho <= 1e-9; ++it) {
            if (near_equal(it->gamma, rec.gamma, 1e-8)) {
                dup = true;
                break;
            }
        }
        if (dup)
            ++merged;
        else
            kept.push_back(std::move(rec));
    }
    records = std::move(kept);
    return merged;
}

}  // namespace

std::string to_string(GroupKind kind) {
    switch (kind) {
    case GroupKind::SurfaceGroup: return "surface-group";
    case GroupKind::Congruence: return "congruence";
    case GroupKind::CyclicTest: return "cyclic-test";
    }
    return "unknown";
}

GroupKind group_kind_from_string(const std::string& s) {
    if (s == "surface-group") return GroupKind::SurfaceGroup;
    if (s == "congruence") return GroupKind::Congruence;
    if (s == "cyclic-test") return GroupKind::CyclicTest;
    throw Error(ErrorKind::Data, "schema-mismatch", "unknown group kind '" + s + "'");
}

FuchsianGroup make_group(std::string name, GroupKind kind, const std::vector<Mobius>& generators,
                         std::vector<std::string> labels) {
    if (generators.empty()) throw Error(ErrorKind::Data, "schema-mismatch", "group needs at least one generator");
    if (labels.empty()) {
        for (std::size_t i = 0; i < generators.size(); ++i) labels.push_back("g" + std::to_string(i + 1));
    }
    if (labels.size() != generators.size())
        throw Error(ErrorKind::Data, "schema-mismatch", "generator and label counts differ");

    FuchsianGroup group;
    group.name = std::move(name);
    group.kind = kind;
    for (std::size_t i = 0; i < generators.size(); ++i) {
        const auto& g = generators[i];
        if (near_equal(g, Mobius::identity(), 1e-12))
            throw Error(ErrorKind::Data, "schema-mismatch", "identity is not a valid generator");
        const bool para = is_parabolic(g);
        if (para && kind != GroupKind::Congruence)
            throw Error(ErrorKind::Data, "schema-mismatch",
                        "generator '" + labels[i] + "' is parabolic; only congruence groups may have |trace| = 2");
        group.generators.push_back(g);
        group.labels.push_back(labels[i]);
        group.parabolic.push_back(para);
    }
    const std::size_t given = group.generators.size();
    for (std::size_t i = 0; i < given; ++i) {
        const Mobius inv = inverse(group.generators[i]);
        const bool present = std::any_of(group.generators.begin(), group.generators.end(),
                                         [&](const Mobius& h) { return near_equal(h, inv, 1e-10); });
        if (!present) {
            group.generators.push_back(inv);
            group.labels.push_back(inverse_label(group.labels[i]));
            group.parabolic.push_back(group.parabolic[i]);
        }
    }
    return group;
}

std::int64_t gamma0_coset_index(std::int64_t c, std::int64_t d, std::int64_t N) {
    c = nt::mod(c, N);
    d = nt::mod(d, N);
    if (c == 0) {
        if (d == 0) throw Error(ErrorKind::Usage, "invalid-coset", "(0 : 0) is not a point of P^1(Z/N)");
        return 0;
    }
    return 1 + nt::mod(d * nt::inverse_mod(c, N), N);
}

SL2Z gamma0_coset_rep(std::int64_t k) {
    if (k == 0) return SL2Z::identity();
    return SL2Z::S() * SL2Z::T(k - 1);
}

std::vector<SL2Z> gamma0_generators(std::int64_t N) {
    if (!nt::is_prime(N)) throw Error(ErrorKind::Usage, "invalid-level", "Gamma_0(N) generators need prime N");
    const std::size_t cosets = static_cast<std::size_t>(N + 1);
    const std::array<SL2Z, 2> moves{SL2Z::S(), SL2Z::T()};
    std::vector<std::optional<SL2Z>> rep(cosets);
    rep[0] = SL2Z::identity();
    std::queue<std::size_t> todo;
    todo.push(0);
    while (!todo.empty()) {
        const std::size_t i = todo.front();
        todo.pop();
        for (const auto& s : moves) {
            const SL2Z g = *rep[i] * s;
            const auto j = static_cast<std::size_t>(gamma0_coset_index(g.c, g.d, N));
            if (!rep[j]) {
                rep[j] = g;
                todo.push(j);
            }
        }
    }
    std::vector<SL2Z> gens;
    auto seen = [&](const SL2Z& h) {
        const SL2Z hc = canonical_sign(h);
        const SL2Z hi = canonical_sign(inverse(h));
        return std::any_of(gens.begin(), gens.end(), [&](const SL2Z& g) { return g == hc || g == hi; });
    };
    for (std::size_t i = 0; i < cosets; ++i) {
        for (const auto& s : moves) {
            const SL2Z g = *rep[i] * s;
            const auto j = static_cast<std::size_t>(gamma0_coset_index(g.c, g.d, N));
            const SL2Z h = g * inverse(*rep[j]);
            if (h.is_plus_minus_identity() || seen(h)) continue;
            gens.push_back(canonical_sign(h));
        }
    }
    return gens;
}

FuchsianGroup builtin_group(const std::string& name) {
    if (name == "cyclic-test") {
        auto g = make_group(name, GroupKind::CyclicTest, {Mobius(2.0, 0.0, 0.0, 0.5)}, {"a"});
        g.probe_points = {HPoint(0.0, 1.0)};
        g.core_radius = 0.0;  // every axis is the imaginary axis through the probe point
        g.default_search_radius = 3.0;
        return g;
    }
    if (name == "bolza") {
        // Side pairings of the regular octagon centred at i: conjugates of the
        // disc transforms [[1+sqrt2, e^{ik pi/4} s], [conj, 1+sqrt2]], s = sqrt(2+2 sqrt2).
        const double alpha = 1.0 + std::numbers::sqrt2;
        const double s = std::sqrt(2.0 + 2.0 * std::numbers::sqrt2);
        std::vector<Mobius> gens;
        for (int k = 0; k < 4; ++k) {
            const double th = k * std::numbers::pi / 4.0;
            gens.emplace_back(alpha + s * std::cos(th), -s * std::sin(th), -s * std::sin(th), alpha - s * std::cos(th));
        }
        auto g = make_group(name, GroupKind::SurfaceGroup, gens, {"a", "b", "c", "d"});
        g.genus = 2;
        g.probe_points = {HPoint(0.0, 1.0)};
        // circumradius of the octagon: cosh R = cot^2(pi/8)
        const double cot = 1.0 / std::tan(std::numbers::pi / 8.0);
        g.core_radius = std::acosh(cot * cot);
        g.default_search_radius = 8.0;
        return g;
    }
    if (name.rfind("gamma0-", 0) == 0) {
        std::int64_t N = 0;
        try {
            N = std::stoll(name.substr(7));
        } catch (const std::exception&) {
            throw Error(ErrorKind::Usage, "unknown-group", "cannot parse level in '" + name + "'");
        }
        if (!nt::is_prime(N))
            throw Error(ErrorKind::Usage, "unknown-group", "only prime levels are supported: '" + name + "'");
        std::vector<Mobius> gens;
        for (const auto& h : gamma0_generators(N)) gens.push_back(h.to_mobius());
        auto g = make_group(name, GroupKind::Congruence, gens, {});
        g.level = static_cast<int>(N);
        g.genus = nt::genus_x0_prime(N);
        for (std::int64_t k = 0; k <= N; ++k)
            g.probe_points.push_back(mobius_apply(gamma0_coset_rep(k).to_mobius(), HPoint(0.0, 1.0)));
        g.default_search_radius = 4.0;
        return g;
    }
    throw Error(ErrorKind::Usage, "unknown-group", "unknown group '" + name + "'");
}

FuchsianGroup group_from_json(const nlohmann::json& doc) {
    try {
        const GroupKind kind = group_kind_from_string(doc.at("kind").get<std::string>());
        std::vector<Mobius> gens;
        for (const auto& row : doc.at("generators")) {
            if (row.size() != 4) throw Error(ErrorKind::Data, "schema-mismatch", "generator must have 4 entries");
            gens.emplace_back(row[0].get<double>(), row[1].get<double>(), row[2].get<double>(), row[3].get<double>());
        }
        std::vector<std::string> labels;
        if (doc.contains("labels")) labels = doc.at("labels").get<std::vector<std::string>>();
        auto g = make_group(doc.value("name", std::string("custom")), kind, gens, labels);
        g.level = doc.value("level", 0);
        g.genus = doc.value("genus", 0);
        if (g.level > 0) {
            if (kind != GroupKind::Congruence || !nt::is_prime(g.level))
                throw Error(ErrorKind::Data, "schema-mismatch", "level is only meaningful for prime congruence groups");
            for (const auto& h : g.generators) {
                for (double v : h.entries())
                    if (std::abs(v - std::nearbyint(v)) > 1e-9)
                        throw Error(ErrorKind::Data, "schema-mismatch", "congruence generators must be integral");
                if (std::llround(h.c()) % g.level != 0)
                    throw Error(ErrorKind::Data, "schema-mismatch", "generator is not in Gamma_0(N)");
            }
        }
        if (doc.contains("probe_points")) {
            for (const auto& p : doc.at("probe_points")) g.probe_points.emplace_back(p[0].get<double>(), p[1].get<double>());
        } else {
            g.probe_points = {HPoint(0.0, 1.0)};
        }
        if (doc.contains("core_radius")) g.core_radius = doc.at("core_radius").get<double>();
        g.default_search_radius = doc.value("search_radius", 4.0);
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Data, "schema-mismatch", std::string("group document: ") + e.what());
    }
}

nlohmann::json group_to_json(const FuchsianGroup& group) {
    nlohmann::json doc;
    doc["name"] = group.name;
    doc["kind"] = to_string(group.kind);
    doc["generators"] = nlohmann::json::array();
    for (const auto& g : group.generators) doc["generators"].push_back({g.a(), g.b(), g.c(), g.d()});
    doc["labels"] = group.labels;
    doc["parabolic"] = group.parabolic;
    if (group.level > 0) doc["level"] = group.level;
    if (group.genus > 0) doc["genus"] = group.genus;
    doc["probe_points"] = nlohmann::json::array();
    for (const auto& p : group.probe_points) doc["probe_points"].push_back({p.x(), p.y()});
    if (group.core_radius) doc["core_radius"] = *group.core_radius;
    doc["search_radius"] = group.default_search_radius;
    return doc;
}

OrbitBall enumerate_ball(const FuchsianGroup& group, const HPoint& z1, const HPoint& z2, double radius,
                         const BallOptions& options) {
    if (group.kind == GroupKind::Congruence && group.level > 0)
        return enumerate_congruence_ball(group.level, z1, z2, radius);
    return enumerate_ball_words(group, z1, z2, radius, options);
}

OrbitBall enumerate_ball_words(const FuchsianGroup& group, const HPoint& z1, const HPoint& z2, double radius,
                               const BallOptions& options) {
    if (!(radius >= 0.0)) throw Error(ErrorKind::Usage, "invalid-radius", "ball radius must be nonnegative");
    if (options.budget == 0) throw Error(ErrorKind::Usage, "invalid-budget", "ball budget must be positive");

    // Words are grown around an anchor point a, and expanded while
    // d(a, w a) <= radius + d(a, z1) + d(a, z2) + 2 max_s d(a, s a). With a = z1 = z2
    // this is the plain rule; a probe point near the group's centre is used
    // when that gives a smaller expansion radius.
    auto max_displacement = [&](const HPoint& a) {
        double m = 0.0;
        for (const auto& s : group.generators) m = std::max(m, hyp_distance(a, mobius_apply(s, a)));
        return m;
    };
    HPoint anchor = z2;
    double prune = radius + hyp_distance(z1, z2) + 2.0 * max_displacement(z2);
    for (const auto& a : group.probe_points) {
        const double p = radius + hyp_distance(a, z1) + hyp_distance(a, z2) + 2.0 * max_displacement(a);
        if (p < prune) {
            prune = p;
            anchor = a;
        }
    }
    std::vector<HPoint> gen_images;
    for (const auto& s : group.generators) gen_images.push_back(mobius_apply(s, anchor));

    struct Node {
        Mobius gamma;
        std::string word;
    };

    OrbitBall ball{z1, z2, radius, {}, false, 0};
    TransformSet seen;
    std::vector<Node> frontier{{Mobius::identity(), ""}};
    seen.insert_if_absent(Mobius::identity());
    {
        const double rho0 = hyp_distance(z1, z2);
        if (rho0 <= radius) ball.records.push_back({Mobius::identity(), rho0, ""});
    }

    const int jobs = std::max(1, options.jobs);
    struct Candidate {
        Mobius gamma;
        double anchor_rho;
        std::size_t parent;
        std::size_t gen;
    };

    while (!frontier.empty()) {
        // Expansion is computed in parallel chunks; insertion happens in a
        // fixed order afterwards so the result does not depend on `jobs`.
        const std::size_t nf = frontier.size();
        const std::size_t ng = group.generators.size();
        std::vector<std::optional<Candidate>> cand(nf * ng);
        auto work = [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                for (std::size_t k = 0; k < ng; ++k) {
                    const double d = hyp_distance(anchor, mobius_apply(frontier[i].gamma, gen_images[k]));
                    if (d <= prune) cand[i * ng + k] = Candidate{compose(frontier[i].gamma, group.generators[k]), d, i, k};
                }
            }
        };
        if (jobs == 1 || nf < 256) {
            work(0, nf);
        } else {
            std::vector<std::thread> pool;
            const std::size_t chunk = (nf + static_cast<std::size_t>(jobs) - 1) / static_cast<std::size_t>(jobs);
            for (int t = 0; t < jobs; ++t) {
                const std::size_t b = static_cast<std::size_t>(t) * chunk;
                const std::size_t e = std::min(nf, b + chunk);
                if (b < e) pool.emplace_back(work, b, e);
            }
            for (auto& th : pool) th.join();
        }

        std::vector<Node> next;
        for (const auto& c : cand) {
            if (!c) continue;
            if (!seen.insert_if_absent(c->gamma)) continue;
            std::string word = frontier[c->parent].word + group.labels[c->gen];
            const double rho = hyp_distance(z1, mobius_apply(c->gamma, z2));
            if (rho <= radius) ball.records.push_back({c->gamma, rho, word});
            next.push_back({c->gamma, std::move(word)});
            if (seen.size() > options.budget) {
                sort_records(ball.records);
                ball.audit_merges = duplicate_audit(ball.records);
                ball.complete = false;
                return ball;
            }
        }
        frontier = std::move(next);
    }
    sort_records(ball.records);
    ball.audit_merges = duplicate_audit(ball.records);
    ball.complete = true;
    return ball;
}

OrbitBall enumerate_congruence_ball(std::int64_t N, const HPoint& z1, const HPoint& z2, double radius) {
    if (!(radius >= 0.0)) throw Error(ErrorKind::Usage, "invalid-radius", "ball radius must be nonnegative");
    if (N < 1) throw Error(ErrorKind::Usage, "invalid-level", "level must be positive");
    const double x1 = z1.x(), y1 = z1.y(), x2 = z2.x(), y2 = z2.y();
    // 2 cosh d(z1, g z2) = ||A1^-1 g A2||_F^2 with A_i = [[sqrt y, x/sqrt y], [0, 1/sqrt y]];
    // the slack keeps boundary elements, the exact distance check follows.
    const double K = 2.0 * std::cosh(radius) * (1.0 + 1e-9) + 1e-9;
    const double Ky = K * y1 * y2;

    OrbitBall ball{z1, z2, radius, {}, true, 0};
    auto consider = [&](std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
        const SL2Z g{a, b, c, d};
        const Mobius m = g.to_mobius();
        const double rho = hyp_distance(z1, mobius_apply(m, z2));
        if (rho <= radius) ball.records.push_back({m, rho, to_string(canonical_sign(g))});
    };

    // c = 0: only translations [[1, b], [0, 1]].
    {
        const double rem = Ky - y1 * y1 - y2 * y2;
        if (rem >= 0.0) {
            const double w = std::sqrt(rem);
            const auto bmin = static_cast<std::int64_t>(std::ceil(x1 - x2 - w));
            const auto bmax = static_cast<std::int64_t>(std::floor(x1 - x2 + w));
            for (std::int64_t b = bmin; b <= bmax; ++b) consider(1, b, 0, 1);
        }
    }
    const double cmax = std::sqrt(K / (y1 * y2));
    for (std::int64_t c = N; static_cast<double>(c) <= cmax; c += N) {
        const double cd = static_cast<double>(c);
        const double rem = Ky - y1 * y1 * y2 * y2 * cd * cd;
        if (rem < 0.0) break;
        const double wd = std::sqrt(rem) / y1;
        const double wa = std::sqrt(rem) / y2;
        const auto dmin = static_cast<std::int64_t>(std::ceil(-cd * x2 - wd));
        const auto dmax = static_cast<std::int64_t>(std::floor(-cd * x2 + wd));
        const auto amin = static_cast<std::int64_t>(std::ceil(cd * x1 - wa));
        const auto amax = static_cast<std::int64_t>(std::floor(cd * x1 + wa));
        for (std::int64_t d = dmin; d <= dmax; ++d) {
            if (std::gcd(d, c) != 1) continue;
            // a d = 1 mod c fixes a modulo c.
            const std::int64_t a0 = nt::inverse_mod(d, c);
            std::int64_t a = amin + nt::mod(a0 - amin, c);
            for (; a <= amax; a += c) {
                const std::int64_t b = (a * d - 1) / c;
                consider(a, b, c, d);
            }
        }
    }
    sort_records(ball.records);
    return ball;
}

CountProfile count_profile(const OrbitBall& ball, const std::vector<double>& thresholds) {
    CountProfile prof;
    for (double t : thresholds) {
        if (!ball.complete || t > ball.radius + 1e-12)
            throw Error(ErrorKind::Usage, "threshold-exceeds-radius",
                        "count requested beyond the certified radius of the ball");
        const auto it = std::upper_bound(ball.records.begin(), ball.records.end(), t,
                                         [](double v, const OrbitRecord& r) { return v < r.rho; });
        prof.thresholds.push_back(t);
        prof.counts.push_back(static_cast<std::size_t>(it - ball.records.begin()));
    }
    return prof;
}

CountProfile atom_profile(const OrbitBall& ball) {
    if (!ball.complete)
        throw Error(ErrorKind::Usage, "threshold-exceeds-radius", "atom profile needs a complete ball");
    CountProfile prof;
    std::size_t count = 0;
    for (const auto& rec : ball.records) {
        ++count;
        if (!prof.thresholds.empty() && rec.rho - prof.thresholds.back() <= 1e-12) {
            prof.counts.back() = count;
        } else {
            prof.thresholds.push_back(rec.rho);
            prof.counts.push_back(count);
        }
    }
    return prof;
}

double hyperbolic_volume(int genus) {
    if (genus < 2) throw Error(ErrorKind::Data, "genus-too-small", "hyperbolic volume needs genus >= 2");
    return 4.0 * std::numbers::pi * (genus - 1);
}

SurfaceGeometry make_geometry(double systole_length, int genus) {
    if (!(systole_length > 0.0)) throw Error(ErrorKind::Usage, "nonpositive-radius", "systole must be positive");
    SurfaceGeometry geom;
    geom.systole = systole_length;
    geom.injectivity_radius = systole_length;
    geom.genus = genus;
    geom.hyp_volume = genus >= 2 ? hyperbolic_volume(genus) : 0.0;
    geom.certified = true;
    geom.shortest_trace = 2.0 * std::cosh(systole_length / 2.0);
    geom.certificate = "given";
    return geom;
}

SurfaceGeometry systole(const FuchsianGroup& group, std::optional<double> search_radius, bool require_certificate,
                        const BallOptions& options) {
    const double R = search_radius.value_or(group.default_search_radius);
    double best = std::numeric_limits<double>::infinity();
    Mobius witness;
    bool all_complete = true;
    for (const auto& p : group.probe_points) {
        const OrbitBall ball = enumerate_ball(group, p, p, R, options);
        all_complete = all_complete && ball.complete;
        for (const auto& rec : ball.records) {
            if (std::abs(rec.gamma.trace()) <= 2.0 + kTraceTol) continue;
            const double len = rec.gamma.translation_length();
            if (len < best) {
                best = len;
                witness = rec.gamma;
            }
        }
    }
    if (!std::isfinite(best))
        throw Error(ErrorKind::Numerical, "no-hyperbolic-element-found",
                    "no hyperbolic element within search radius " + std::to_string(R));

    SurfaceGeometry geom;
    geom.systole = best;
    geom.injectivity_radius = best;
    geom.genus = group.genus;
    geom.hyp_volume = group.genus >= 2 ? hyperbolic_volume(group.genus) : 0.0;
    geom.witness = witness;
    geom.shortest_trace = std::abs(witness.trace());

    if (group.kind == GroupKind::Congruence && group.level > 0) {
        const auto t = static_cast<std::int64_t>(std::llround(geom.shortest_trace));
        bool smaller_possible = false;
        for (std::int64_t s = 3; s < t; ++s)
            if (nt::is_square_mod(s * s - 4, group.level)) smaller_possible = true;
        geom.certified = !smaller_possible;
        geom.certificate = "trace-residue: no |trace| in [3," + std::to_string(t) + ") has t^2-4 square mod " +
                           std::to_string(group.level);
    } else if (group.core_radius) {
        geom.certified = all_complete && best <= R - 2.0 * *group.core_radius;
        geom.certificate = "ball: length <= R - 2*core_radius with R=" + std::to_string(R) +
                           ", core_radius=" + std::to_string(*group.core_radius);
    } else {
        geom.certified = false;
        geom.certificate = "none: group has no core radius";
    }
    if (require_certificate && !geom.certified)
        throw Error(ErrorKind::Numerical, "uncertified-systole",
                    "search radius " + std::to_string(R) + " too small to certify systole " + std::to_string(best));
    return geom;
}

double injectivity_radius(const SurfaceGeometry& geom) { return geom.systole; }

double pointwise_displacement(const FuchsianGroup& group, const HPoint& z, double radius, const BallOptions& options) {
    const OrbitBall ball = enumerate_ball(group, z, z, radius, options);
    if (!ball.complete) throw Error(ErrorKind::Numerical, "budget-exhausted", "ball incomplete");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& rec : ball.records) {
        if (near_equal(rec.gamma, Mobius::identity(), 1e-10)) continue;
        best = std::min(best, rec.rho);
    }
    return best;
}

std::vector<HPoint> bolza_octagon_samples(int radial, int angular) {
    const auto group = builtin_group("bolza");
    const HPoint centre(0.0, 1.0);
    const double circum = *group.core_radius;
    std::vector<HPoint> out;
    for (int i = 0; i < radial; ++i) {
        const double r = circum * (i + 0.5) / radial;
        for (int j = 0; j < angular; ++j) {
            const double th = 2.0 * std::numbers::pi * (j + 0.25) / angular;
            // disc point at hyperbolic distance r from 0, mapped to the half-plane
            const double t = std::tanh(r / 2.0);
            const std::complex<double> w(t * std::cos(th), t * std::sin(th));
            const std::complex<double> z = std::complex<double>(0.0, 1.0) * (1.0 + w) / (1.0 - w);
            const HPoint p(z.real(), z.imag());
            const double d0 = hyp_distance(centre, p);
            bool inside = true;
            for (const auto& g : group.generators)
                if (hyp_distance(mobius_apply(g, centre), p) < d0) inside = false;
            if (inside) out.push_back(p);
        }
    }
    return out;
}

}  // namespace hyperbergman

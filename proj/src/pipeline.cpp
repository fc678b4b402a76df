#include "hyperbergman/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <mutex>
#include <thread>

#include "hyperbergman/error.hpp"
#include "hyperbergman/format.hpp"
#include "hyperbergman/numtheory.hpp"

namespace hyperbergman {

namespace fs = std::filesystem;

RunConfig run_config_from_json(const nlohmann::json& doc, RunConfig base) {
    static const std::set<std::string> known{"levels",      "d_values", "grid",          "trials",   "seed",
                                             "jobs",        "fixtures_only", "fixtures_dir", "cache_dir", "out_dir",
                                             "quadrature_order", "eval_tol", "gram_tol",   "y_max",    "gonality",
                                             "lmfdb",       "schema_version"};
    if (!doc.is_object()) throw Error(ErrorKind::Usage, "invalid-config", "config must be a JSON object");
    for (const auto& [key, _] : doc.items())
        if (!known.count(key)) throw Error(ErrorKind::Usage, "invalid-config", "unknown config key '" + key + "'");
    try {
        RunConfig c = std::move(base);
        c.levels = doc.value("levels", c.levels);
        c.d_values = doc.value("d_values", c.d_values);
        c.grid = doc.value("grid", c.grid);
        c.trials = doc.value("trials", c.trials);
        c.seed = doc.value("seed", c.seed);
        c.jobs = doc.value("jobs", c.jobs);
        c.fixtures_only = doc.value("fixtures_only", c.fixtures_only);
        c.fixtures_dir = doc.value("fixtures_dir", c.fixtures_dir);
        c.cache_dir = doc.value("cache_dir", c.cache_dir);
        c.out_dir = doc.value("out_dir", c.out_dir);
        c.quadrature_order = doc.value("quadrature_order", c.quadrature_order);
        c.eval_tol = doc.value("eval_tol", c.eval_tol);
        c.gram_tol = doc.value("gram_tol", c.gram_tol);
        c.y_max = doc.value("y_max", c.y_max);
        if (doc.contains("gonality")) {
            if (doc["gonality"].is_null())
                c.gonality.reset();
            else
                c.gonality = doc["gonality"].get<int>();
        }
        if (doc.contains("lmfdb")) c.lmfdb = lmfdb_config_from_json(doc["lmfdb"]);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Usage, "invalid-config", e.what());
    }
}

nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j = {{"schema_version", 1},
                        {"levels", c.levels},
                        {"d_values", c.d_values},
                        {"grid", c.grid},
                        {"trials", c.trials},
                        {"seed", c.seed},
                        {"jobs", c.jobs},
                        {"fixtures_only", c.fixtures_only},
                        {"quadrature_order", c.quadrature_order},
                        {"eval_tol", c.eval_tol},
                        {"gram_tol", c.gram_tol},
                        {"y_max", c.y_max},
                        {"gonality", c.gonality ? nlohmann::json(*c.gonality) : nlohmann::json(nullptr)}};
    return j;
}

void validate(const RunConfig& c) {
    auto bad = [](const std::string& msg) { throw Error(ErrorKind::Usage, "invalid-config", msg); };
    if (c.levels.empty()) throw Error(ErrorKind::Usage, "empty-levels", "at least one level is required");
    for (int N : c.levels)
        if (!nt::is_prime(N)) bad("level " + std::to_string(N) + " is not prime");
    for (int d : c.d_values)
        if (d < 1) bad("d values must be >= 1");
    if (c.grid < 1 || c.trials < 1) bad("grid and trials must be positive");
    if (c.jobs < 1) bad("jobs must be positive");
    if (!(c.eval_tol > 0) || !(c.gram_tol > 0)) bad("tolerances must be positive");
    if (!(c.y_max > 1.0)) bad("y_max must exceed 1");
    if (c.gonality && *c.gonality < 2) bad("gonality must be >= 2");
    for (int d : c.d_values)
        if (c.gonality && d >= *c.gonality) bad("d = " + std::to_string(d) + " is not below the gonality");
}

FetchOptions fetch_options(const RunConfig& config) {
    FetchOptions o = default_fetch_options();
    if (!config.fixtures_dir.empty()) o.fixtures_dir = config.fixtures_dir;
    if (!config.cache_dir.empty()) o.cache_dir = config.cache_dir;
    o.fixtures_only = config.fixtures_only;
    o.lmfdb = config.lmfdb;
    return o;
}

LevelContext load_level(int N, const RunConfig& config) {
    LevelContext ctx;
    ctx.level = N;
    const FetchOptions opts = fetch_options(config);
    ctx.records = fetch_level(N, opts);
    for (const auto& r : ctx.records) ctx.forms.push_back(qexpansion_from_record(r));

    const auto group = builtin_group("gamma0-" + std::to_string(N));
    ctx.geom = systole(group);
    ctx.closed_form_B = bx_closed_form(injectivity_radius(ctx.geom));

    const fs::path cache_file = opts.cache_dir / "basis" /
                                ("level" + std::to_string(N) + "-order" + std::to_string(config.quadrature_order) + ".json");
    if (fs::exists(cache_file)) {
        try {
            std::ifstream in(cache_file);
            ctx.basis = basis_from_json(nlohmann::json::parse(in), ctx.forms);
            ctx.basis_cached = true;
        } catch (const Error&) {
            ctx.basis_cached = false;
        } catch (const nlohmann::json::exception&) {
            ctx.basis_cached = false;
        }
    }
    if (!ctx.basis_cached) {
        if (ctx.forms.size() < 2)
            throw Error(ErrorKind::Data, "genus-too-small", "X_0(" + std::to_string(N) + ") has genus < 2");
        ctx.basis = orthonormalize(ctx.forms, petersson_gram(ctx.forms, config.quadrature_order, config.gram_tol));
        atomic_write(cache_file, basis_to_json(ctx.basis).dump(2) + "\n");
    }
    if (ctx.basis.genus != ctx.geom.genus)
        throw Error(ErrorKind::Data, "schema-mismatch",
                    "level " + std::to_string(N) + ": " + std::to_string(ctx.basis.genus) +
                        " forms but the genus formula gives " + std::to_string(ctx.geom.genus));
    return ctx;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

std::vector<Thm21Row> verify_thm21(const LevelContext& ctx, const RunConfig& config) {
    const auto points = cell_grid_points(ctx.level, config.grid, config.y_max);
    std::vector<Thm21Row> rows(points.size());
    parallel_for(points.size(), config.jobs, [&](std::size_t i) {
        rows[i].z = points[i];
        rows[i].bergman = bergman_kernel(ctx.basis, points[i]);
        rows[i].bound = ctx.closed_form_B;
    });
    return rows;
}

RatioPath ratio_path_from_string(const std::string& s) {
    if (s == "det") return RatioPath::Det;
    if (s == "perm") return RatioPath::Perm;
    throw Error(ErrorKind::Usage, "invalid-path", "ratio path must be 'det' or 'perm', got '" + s + "'");
}

std::vector<Thm32Row> verify_thm32(const LevelContext& ctx, int d, const RunConfig& config, RatioPath path) {
    if (d < 1) throw Error(ErrorKind::Usage, "invalid-dimension", "d must be >= 1");
    if (path == RatioPath::Perm && d > 4)
        throw Error(ErrorKind::Usage, "d-too-large-for-permutation-path",
                    "the permutation expansion is limited to d <= 4, got d = " + std::to_string(d));
    std::mt19937_64 rng(config.seed + 1000003ULL * static_cast<std::uint64_t>(ctx.level) + static_cast<std::uint64_t>(d));
    const int probes = d >= 2 ? 5 : 0;
    std::vector<ProductPoint> points;
    for (int t = 0; t < config.trials + probes; ++t) {
        std::vector<HPoint> pts;
        for (int k = 0; k < d; ++k) pts.push_back(sample_cell_point(ctx.level, rng, config.y_max));
        if (t >= config.trials) pts[1] = pts[0];
        points.emplace_back(std::move(pts), config.gonality);
    }
    const double bound = thm32_bound(d, ctx.geom, ctx.closed_form_B);
    std::vector<Thm32Row> rows(points.size());
    parallel_for(points.size(), config.jobs, [&](std::size_t i) {
        rows[i].point = points[i];
        rows[i].ratio = path == RatioPath::Det ? canonical_volume_ratio_det(ctx.basis, ctx.geom, points[i])
                                               : canonical_volume_ratio_perm(ctx.basis, ctx.geom, points[i]);
        rows[i].bound = bound;
        rows[i].probe = static_cast<int>(i) >= config.trials;
    });
    return rows;
}

SweepResult sweep_levels(const std::vector<int>& levels, const RunConfig& config) {
    if (levels.empty()) throw Error(ErrorKind::Usage, "empty-levels", "the sweep needs at least one level");
    SweepResult out;
    std::vector<SweepRow> rows(levels.size());
    parallel_for(levels.size(), config.jobs, [&](std::size_t i) {
        const int N = levels[i];
        if (!nt::is_prime(N)) throw Error(ErrorKind::Usage, "non-prime-level", std::to_string(N) + " is not prime");
        const int g = nt::genus_x0_prime(N);
        if (g < 2)
            throw Error(ErrorKind::Data, "genus-too-small",
                        "X_0(" + std::to_string(N) + ") has genus " + std::to_string(g));
        const auto geom = systole(builtin_group("gamma0-" + std::to_string(N)));
        rows[i] = {N, geom.genus, geom.systole, geom.certified, bx_closed_form(injectivity_radius(geom))};
    });
    out.rows = rows;
    out.min_systole = rows.front().systole;
    for (const auto& r : rows) {
        out.family_bound = std::max(out.family_bound, r.bound);
        out.min_systole = std::min(out.min_systole, r.systole);
    }
    return out;
}

std::string csv_header_line(const RunConfig& config) {
    // the thread count does not change any value, so it stays out of the header
    auto doc = to_json(config);
    doc.erase("jobs");
    return "# schema_version=1 config=" + doc.dump();
}

void write_thm21_csv(std::ostream& os, int level, const std::vector<Thm21Row>& rows, const RunConfig& config) {
    os << csv_header_line(config) << "\n";
    os << "level,x,y,bergman,bound,margin\n";
    for (const auto& r : rows)
        os << level << ',' << fmt17(r.z.x()) << ',' << fmt17(r.z.y()) << ',' << fmt17(r.bergman) << ','
           << fmt17(r.bound) << ',' << fmt17(r.margin()) << '\n';
}

void write_thm32_csv(std::ostream& os, int level, int d, const std::vector<Thm32Row>& rows, const RunConfig& config) {
    os << csv_header_line(config) << "\n";
    os << "level,d,point,ratio,bound,margin,probe\n";
    for (const auto& r : rows) {
        std::string pt;
        for (const auto& z : r.point.points) {
            if (!pt.empty()) pt += ' ';
            pt += fmt17(z.x()) + ':' + fmt17(z.y());
        }
        os << level << ',' << d << ',' << pt << ',' << fmt17(r.ratio) << ',' << fmt17(r.bound) << ','
           << fmt17(r.margin()) << ',' << (r.probe ? 1 : 0) << '\n';
    }
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep, const RunConfig& config) {
    os << csv_header_line(config) << "\n";
    os << "level,genus,systole,certified,bound\n";
    for (const auto& r : sweep.rows)
        os << r.level << ',' << r.genus << ',' << fmt17(r.systole) << ',' << (r.certified ? 1 : 0) << ','
           << fmt17(r.bound) << '\n';
    os << "# family_bound=" << fmt17(sweep.family_bound) << " min_systole=" << fmt17(sweep.min_systole) << "\n";
}

}  // namespace hyperbergman

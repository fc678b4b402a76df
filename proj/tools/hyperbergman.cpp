// Command-line driver.
//
//   hyperbergman systole --group bolza
//   hyperbergman bound --r 2.5 | --group gamma0-23
//   hyperbergman verify-thm21 --level 23 --grid 200
//   hyperbergman verify-thm32 --level 23 --d 2 --trials 200
//   hyperbergman sweep --levels 23,29,31,37
//   hyperbergman fetch --level 23

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hyperbergman/bounds.hpp"
#include "hyperbergman/error.hpp"
#include "hyperbergman/format.hpp"
#include "hyperbergman/fuchsian.hpp"
#include "hyperbergman/pipeline.hpp"

using namespace hyperbergman;
namespace fs = std::filesystem;

namespace {

struct Flags {
    std::string config_path;
    std::optional<int> level;
    std::vector<int> levels;
    bool levels_given = false;
    std::optional<int> d;
    std::optional<int> grid;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<bool> fixtures_only;
    std::optional<std::string> out;
    std::string group;
    std::optional<double> r;
    std::optional<double> delta;
    std::string path = "det";
};

RunConfig effective_config(const Flags& f) {
    RunConfig c;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw Error(ErrorKind::Usage, "invalid-config", "cannot read config file " + f.config_path);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::Usage, "invalid-config", e.what());
        }
        c = run_config_from_json(doc, c);
    }
    if (f.level) c.levels = {*f.level};
    if (f.levels_given) c.levels = f.levels;
    if (f.d) c.d_values = {*f.d};
    if (f.grid) c.grid = *f.grid;
    if (f.trials) c.trials = *f.trials;
    if (f.seed) c.seed = *f.seed;
    if (f.jobs) c.jobs = *f.jobs;
    if (f.fixtures_only) c.fixtures_only = *f.fixtures_only;
    if (f.out) c.out_dir = *f.out;
    validate(c);
    return c;
}

fs::path output_file(const RunConfig& c, const std::string& name) {
    fs::create_directories(c.out_dir);
    return fs::path(c.out_dir) / name;
}

int cmd_systole(const Flags& f) {
    const auto group = builtin_group(f.group);
    const auto geom = systole(group, f.r, false);
    nlohmann::json out = {{"schema_version", 1},
                          {"group", group.name},
                          {"systole", geom.systole},
                          {"injectivity_radius", injectivity_radius(geom)},
                          {"shortest_trace", geom.shortest_trace},
                          {"certified", geom.certified},
                          {"certificate", geom.certificate},
                          {"genus", geom.genus}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_bound(const Flags& f) {
    if (f.r && !f.group.empty()) throw Error(ErrorKind::Usage, "conflicting-flags", "give either --r or --group");
    if (f.r) {
        std::cout << to_json(closed_form_report(*f.r)).dump(2) << "\n";
        return 0;
    }
    if (f.group.empty()) throw Error(ErrorKind::Usage, "missing-flag", "bound needs --r or --group");
    const auto group = builtin_group(f.group);
    const auto geom = systole(group);
    const double r = injectivity_radius(geom);
    const double delta = f.delta.value_or(0.75 * r);
    const HPoint z = group.probe_points.front();
    const auto ball = enumerate_ball(group, z, z, delta);
    const auto report = assemble_theorem21(ball, geom, delta, true);
    auto doc = to_json(report);
    doc["group"] = group.name;
    doc["chain_holds"] = report.chain_holds();
    std::cout << doc.dump(2) << "\n";
    return report.chain_holds() ? 0 : 1;
}

int cmd_thm21(const Flags& f) {
    const RunConfig c = effective_config(f);
    bool ok = true;
    for (int N : c.levels) {
        const auto ctx = load_level(N, c);
        const auto rows = verify_thm21(ctx, c);
        const auto file = output_file(c, "thm21_level" + std::to_string(N) + ".csv");
        std::ofstream os(file);
        write_thm21_csv(os, N, rows, c);
        double min_margin = rows.front().margin();
        for (const auto& r : rows) min_margin = std::min(min_margin, r.margin());
        ok = ok && min_margin > 0;
        std::cout << "level " << N << " genus " << ctx.basis.genus << " r_X " << fmt17(injectivity_radius(ctx.geom))
                  << " bound " << fmt17(ctx.closed_form_B) << " points " << rows.size() << " min_margin "
                  << fmt17(min_margin) << " -> " << file.string() << "\n";
    }
    return ok ? 0 : 1;
}

int cmd_thm32(const Flags& f) {
    const RunConfig c = effective_config(f);
    const RatioPath path = ratio_path_from_string(f.path);
    bool ok = true;
    for (int N : c.levels) {
        const auto ctx = load_level(N, c);
        for (int d : c.d_values) {
            const auto rows = verify_thm32(ctx, d, c, path);
            const auto file = output_file(c, "thm32_level" + std::to_string(N) + "_d" + std::to_string(d) + ".csv");
            std::ofstream os(file);
            write_thm32_csv(os, N, d, rows, c);
            double min_margin = rows.front().margin(), max_probe = 0.0;
            for (const auto& r : rows) {
                if (r.probe)
                    max_probe = std::max(max_probe, r.ratio);
                else
                    min_margin = std::min(min_margin, r.margin());
            }
            ok = ok && min_margin > 0;
            std::cout << "level " << N << " d " << d << " trials " << c.trials << " min_margin " << fmt17(min_margin)
                      << " max_probe_ratio " << fmt17(max_probe) << " -> " << file.string() << "\n";
        }
    }
    return ok ? 0 : 1;
}

int cmd_sweep(const Flags& f) {
    const RunConfig c = effective_config(f);
    const auto sweep = sweep_levels(c.levels, c);
    const auto file = output_file(c, "sweep.csv");
    std::ofstream os(file);
    write_sweep_csv(os, sweep, c);
    write_sweep_csv(std::cout, sweep, c);
    return 0;
}

int cmd_fetch(const Flags& f) {
    const RunConfig c = effective_config(f);
    for (int N : c.levels) {
        const auto recs = fetch_level(N, fetch_options(c));
        const auto audit = validate_records(recs);
        for (const auto& r : recs)
            std::cout << r.label << " source " << to_string(r.source) << " coefficients " << r.coefficients.size()
                      << " fricke " << r.atkin_lehner_sign << "\n";
        for (const auto& v : audit.violations) std::cout << "audit: " << v << "\n";
        if (!audit.clean()) return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bergman kernel bounds on hyperbolic surfaces and their symmetric products"};
    app.require_subcommand(1);
    Flags f;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", f.config_path, "JSON run configuration");
        sub->add_option("--seed", f.seed, "random seed");
        sub->add_option("--jobs", f.jobs, "worker threads");
        sub->add_option("--out", f.out, "output directory");
        sub->add_flag("--fixtures-only,!--network", f.fixtures_only, "never contact the network (default)");
    };

    auto* sys = app.add_subcommand("systole", "shortest closed geodesic of a built-in group");
    sys->add_option("--group", f.group, "cyclic-test, bolza or gamma0-N")->required();
    sys->add_option("--r", f.r, "search radius");

    auto* bound = app.add_subcommand("bound", "closed-form bound or the assembled orbit-sum chain");
    bound->add_option("--r", f.r, "injectivity radius");
    bound->add_option("--group", f.group, "built-in group");
    bound->add_option("--delta", f.delta, "split radius (default 3r/4)");

    auto* t21 = app.add_subcommand("verify-thm21", "B_X(z) against the closed-form bound on a grid");
    t21->add_option("--level", f.level, "prime level");
    t21->add_option("--grid", f.grid, "number of grid points");
    add_common(t21);

    auto* t32 = app.add_subcommand("verify-thm32", "canonical volume ratio on X^d against its bound");
    t32->add_option("--level", f.level, "prime level");
    t32->add_option("--d", f.d, "number of factors");
    t32->add_option("--trials", f.trials, "random points");
    t32->add_option("--path", f.path, "det or perm");
    add_common(t32);

    auto* sweep = app.add_subcommand("sweep", "genus, systole and bound over a family of levels");
    sweep->add_option("--levels", f.levels, "comma-separated prime levels")->delimiter(',');
    add_common(sweep);

    auto* fetch = app.add_subcommand("fetch", "fetch and audit newform coefficients");
    fetch->add_option("--level", f.level, "prime level");
    fetch->add_option("--levels", f.levels, "comma-separated prime levels")->delimiter(',');
    add_common(fetch);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    f.levels_given = sweep->count("--levels") > 0 || fetch->count("--levels") > 0;
    try {
        if (*sys) return cmd_systole(f);
        if (*bound) return cmd_bound(f);
        if (*t21) return cmd_thm21(f);
        if (*t32) return cmd_thm32(f);
        if (*sweep) return cmd_sweep(f);
        if (*fetch) return cmd_fetch(f);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

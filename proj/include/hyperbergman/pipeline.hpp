#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperbergman/bounds.hpp"
#include "hyperbergman/lmfdb.hpp"
#include "hyperbergman/modforms.hpp"
#include "hyperbergman/product.hpp"

namespace hyperbergman {

struct RunConfig {
    std::vector<int> levels{23, 29, 31, 37};
    std::vector<int> d_values{2, 3};
    int grid = 200;
    int trials = 200;
    std::uint64_t seed = 20261017;
    int jobs = 1;
    bool fixtures_only = true;
    std::string fixtures_dir;  // empty: default_fixtures_dir()
    std::string cache_dir;     // empty: default_cache_dir()
    std::string out_dir = "out";
    int quadrature_order = 20;
    double eval_tol = 1e-10;
    double gram_tol = 1e-9;
    double y_max = 2.0;              // sampling height inside F
    std::optional<int> gonality;     // validated against d when set
    LmfdbConfig lmfdb;
};

/// Fields present in `doc` override `base`; unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& doc, RunConfig base = {});
nlohmann::json to_json(const RunConfig& config);

/// Throws Usage/invalid-config on non-prime levels, d < 1, nonpositive
/// tolerances or counts.
void validate(const RunConfig& config);

FetchOptions fetch_options(const RunConfig& config);

/// Everything needed to evaluate the kernel bounds at one level.
struct LevelContext {
    int level = 0;
    std::vector<NewformRecord> records;
    std::vector<QExpansion> forms;
    CuspFormBasis basis;
    SurfaceGeometry geom;
    double closed_form_B = 0.0;  // bx_closed_form(r_X)
    bool basis_cached = false;
};

/// Fetches the newforms, certifies the systole and builds (or loads from
/// cache/basis/) the orthonormal basis.
LevelContext load_level(int N, const RunConfig& config);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Callers write results
/// by index, so outputs do not depend on scheduling.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

struct Thm21Row {
    HPoint z{0.0, 1.0};
    double bergman = 0.0;
    double bound = 0.0;
    double margin() const { return bound - bergman; }
};

std::vector<Thm21Row> verify_thm21(const LevelContext& ctx, const RunConfig& config);

struct Thm32Row {
    ProductPoint point;
    double ratio = 0.0;
    double bound = 0.0;
    bool probe = false;  // duplicated-coordinate probe
    double margin() const { return bound - ratio; }
};

enum class RatioPath { Det, Perm };
RatioPath ratio_path_from_string(const std::string& s);

/// `trials` random points plus a few duplicated-coordinate probes.
std::vector<Thm32Row> verify_thm32(const LevelContext& ctx, int d, const RunConfig& config,
                                   RatioPath path = RatioPath::Det);

struct SweepRow {
    int level = 0;
    int genus = 0;
    double systole = 0.0;
    bool certified = false;
    double bound = 0.0;  // bx_closed_form(systole)
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double family_bound = 0.0;  // max over rows
    double min_systole = 0.0;
};

/// Genus and certified systole per level; needs no cusp forms.
SweepResult sweep_levels(const std::vector<int>& levels, const RunConfig& config);

std::string csv_header_line(const RunConfig& config);
void write_thm21_csv(std::ostream& os, int level, const std::vector<Thm21Row>& rows, const RunConfig& config);
void write_thm32_csv(std::ostream& os, int level, int d, const std::vector<Thm32Row>& rows, const RunConfig& config);
void write_sweep_csv(std::ostream& os, const SweepResult& sweep, const RunConfig& config);

}  // namespace hyperbergman

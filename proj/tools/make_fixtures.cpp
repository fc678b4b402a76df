// Generates the offline newform fixtures from modular symbols.
//
//   make_fixtures --levels 23,29,31,37 --coefficients 1000 --out data/fixtures

#include <iostream>

#include <CLI11.hpp>

#include "hyperbergman/error.hpp"
#include "hyperbergman/format.hpp"
#include "hyperbergman/lmfdb.hpp"
#include "hyperbergman/modsym.hpp"

using namespace hyperbergman;

int main(int argc, char** argv) {
    CLI::App app{"Generate weight-2 newform fixtures for prime levels"};
    std::vector<int> levels{23, 29, 31, 37};
    int M = 1000;
    std::string out_dir = "data/fixtures";
    std::string stamp = "2026-10-17T00:00:00Z";
    app.add_option("--levels", levels, "prime levels")->delimiter(',');
    app.add_option("--coefficients", M, "number of coefficients a_1..a_M");
    app.add_option("--out", out_dir, "fixture root directory");
    app.add_option("--timestamp", stamp, "retrieved_at value written into every record");
    CLI11_PARSE(app, argc, argv);

    try {
        for (int N : levels) {
            const auto forms = modsym::newforms(N, M);
            std::vector<NewformRecord> recs;
            for (const auto& f : forms) {
                NewformRecord rec;
                rec.level = N;
                rec.label = f.label;
                rec.embedding_index = f.embedding;
                rec.atkin_lehner_sign = f.fricke_sign;
                for (double a : f.coefficients) {
                    const double v = a + 0.0;  // no negative zeros in the files
                    rec.coefficient_strings.emplace_back(shortest_repr(v), "0");
                    rec.coefficients.emplace_back(v, 0.0);
                }
                rec.source = RecordSource::Fixture;
                rec.retrieved_at = stamp;
                rec.provenance = {
                    {"generator", "weight-2 modular symbols, plus quotient, Merel Heilbronn matrices"},
                    {"newform", f.label.substr(0, f.label.size() - 4)},
                    {"orbit_dimension", f.orbit_dim},
                    {"truncation", M},
                };
                recs.push_back(std::move(rec));
            }
            const auto audit = validate_records(recs, M);
            for (const auto& v : audit.violations) std::cerr << "level " << N << ": " << v << "\n";
            if (!audit.clean()) return 3;
            for (const auto& r : recs) {
                const auto path = std::filesystem::path(out_dir) / ("level" + std::to_string(N)) / (r.label + ".json");
                atomic_write(path, dump_record(r));
                std::cout << path.string() << "\n";
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    }
    return 0;
}

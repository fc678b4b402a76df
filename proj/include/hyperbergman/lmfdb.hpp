#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace hyperbergman {

enum class RecordSource { Network, Fixture };

std::string to_string(RecordSource s);

/// One complex embedding of a weight-2 newform of prime level, as served or
/// as stored in a fixture.
struct NewformRecord {
    int level = 0;
    std::string label;          // e.g. "23.2.a.a.1.2"
    int embedding_index = 0;    // 1-based
    int atkin_lehner_sign = 0;  // eigenvalue of the Fricke involution W_N, +-1
    std::vector<std::pair<std::string, std::string>> coefficient_strings;  // (re, im) as served
    std::vector<std::complex<double>> coefficients;                         // a_1 .. a_M
    RecordSource source = RecordSource::Fixture;
    std::string retrieved_at;
    nlohmann::json provenance;
};

/// Parses a record document; throws Data/schema-mismatch on malformed input.
NewformRecord record_from_json(const nlohmann::json& doc);
nlohmann::json record_to_json(const NewformRecord& rec);

/// Canonical serialization used for fixtures and the cache (2-space indent,
/// trailing newline), so round trips are byte-identical.
std::string dump_record(const NewformRecord& rec);

/// Writes via a temporary file and rename, so readers never see partial files.
void atomic_write(const std::filesystem::path& path, const std::string& content);

struct LmfdbConfig {
    std::string host = "https://www.lmfdb.org";
    // {level} is substituted; the newform query lists labels, Fricke signs
    // and the orbit code used to join the embedding table.
    std::string newforms_path =
        "/api/mf_newforms/?level={level}&weight=2&char_order=1&_format=json"
        "&_fields=label,dim,fricke_eigenval,hecke_orbit_code";
    // {hecke_orbit_code} is substituted; each row holds one embedding with
    // coefficients a_n / sqrt(n) as [re, im] pairs.
    std::string embeddings_path =
        "/api/mf_hecke_cc/?hecke_orbit_code={hecke_orbit_code}&_format=json"
        "&_fields=label,embedding_index,an_normalized";
    int timeout_seconds = 20;
};

LmfdbConfig lmfdb_config_from_json(const nlohmann::json& doc);

struct FetchOptions {
    std::filesystem::path fixtures_dir;  // fixtures/levelN/<label>.json
    std::filesystem::path cache_dir;     // cache/levelN/<label>.json
    bool fixtures_only = true;           // network access is opt-in
    int min_coefficients = 500;
    LmfdbConfig lmfdb;
};

/// Default directories: fixtures shipped with the sources, cache under
/// $HYPERBERGMAN_CACHE or ./cache.
std::filesystem::path default_fixtures_dir();
std::filesystem::path default_cache_dir();
FetchOptions default_fetch_options();

/// All embeddings of all weight-2 newforms of prime level N, in label order.
/// Looks in the cache, then the fixtures, then (if allowed) the network.
/// Network results are written to the cache. Errors: genus-too-small,
/// network-unavailable-and-no-fixture, schema-mismatch.
std::vector<NewformRecord> fetch_level(int N, const FetchOptions& options);

/// Network path only; throws network-unavailable on transport failure.
std::vector<NewformRecord> fetch_level_network(int N, const FetchOptions& options);

struct AuditReport {
    std::vector<std::string> violations;
    bool clean() const { return violations.empty(); }
};

/// Report-only checks: a_1 = 1, truncation >= min, Deligne bound
/// |a_n| <= d(n) sqrt(n) (+1e-6), Fricke sign consistent with a_N = -eps,
/// prime level, and embedding count equal to the genus of X_0(N) from the
/// closed-form genus formula.
AuditReport validate_records(const std::vector<NewformRecord>& records, int min_coefficients = 500);

}  // namespace hyperbergman

#include "hyperbergman/lmfdb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <httplib.h>

#include "hyperbergman/error.hpp"
#include "hyperbergman/format.hpp"
#include "hyperbergman/numtheory.hpp"

namespace hyperbergman {

namespace fs = std::filesystem;

namespace {

constexpr int kSchemaVersion = 1;

std::string replace_all(std::string s, const std::string& key, const std::string& value) {
    for (std::size_t pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + value.size()))
        s.replace(pos, key.size(), value);
    return s;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Data, "unreadable-file", "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Embedding records in a directory, sorted by label. Other JSON files
// (e.g. the basis cache) are skipped.
std::vector<NewformRecord> load_dir(const fs::path& dir) {
    std::vector<NewformRecord> out;
    if (!fs::is_directory(dir)) return out;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto& p = entry.path();
        if (p.extension() != ".json" || p.filename() == "basis.json") continue;
        files.push_back(p);
    }
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(read_file(p));
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorKind::Data, "schema-mismatch", p.string() + ": " + e.what());
        }
        out.push_back(record_from_json(doc));
    }
    return out;
}

nlohmann::json get_json(httplib::Client& cli, const std::string& path) {
    auto res = cli.Get(path);
    if (!res)
        throw Error(ErrorKind::Data, "network-unavailable",
                    "request failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw Error(ErrorKind::Data, "network-unavailable", "HTTP status " + std::to_string(res->status));
    try {
        return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Data, "schema-mismatch", std::string("response is not JSON: ") + e.what());
    }
}

}  // namespace

std::string to_string(RecordSource s) {
    switch (s) {
    case RecordSource::Network: return "network";
    case RecordSource::Fixture: return "fixture";
    }
    return "unknown";
}

NewformRecord record_from_json(const nlohmann::json& doc) {
    NewformRecord rec;
    try {
        if (doc.at("schema_version").get<int>() != kSchemaVersion)
            throw Error(ErrorKind::Data, "schema-mismatch", "unsupported schema_version");
        rec.level = doc.at("level").get<int>();
        rec.label = doc.at("label").get<std::string>();
        rec.embedding_index = doc.at("embedding_index").get<int>();
        rec.atkin_lehner_sign = doc.at("atkin_lehner_sign").get<int>();
        if (doc.value("weight", 2) != 2) throw Error(ErrorKind::Data, "schema-mismatch", "weight must be 2");
        const std::string norm = doc.value("normalization", std::string("arithmetic"));
        if (norm != "arithmetic" && norm != "analytic")
            throw Error(ErrorKind::Data, "schema-mismatch", "unknown normalization '" + norm + "'");
        std::size_t n = 0;
        for (const auto& pair : doc.at("coefficients")) {
            ++n;
            if (!pair.is_array() || pair.size() != 2)
                throw Error(ErrorKind::Data, "schema-mismatch", "coefficient must be a [re, im] pair");
            const std::string re = pair[0].get<std::string>();
            const std::string im = pair[1].get<std::string>();
            std::complex<double> a(parse_double(re), parse_double(im));
            if (norm == "analytic") a *= std::sqrt(static_cast<double>(n));
            rec.coefficient_strings.emplace_back(re, im);
            rec.coefficients.push_back(a);
        }
        const std::string src = doc.value("source", std::string("fixture"));
        if (src == "network")
            rec.source = RecordSource::Network;
        else if (src == "fixture")
            rec.source = RecordSource::Fixture;
        else
            throw Error(ErrorKind::Data, "schema-mismatch", "unknown source '" + src + "'");
        rec.retrieved_at = doc.value("retrieved_at", std::string());
        rec.provenance = doc.value("provenance", nlohmann::json::object());
        if (rec.provenance.is_object()) rec.provenance["normalization"] = norm;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Data, "schema-mismatch", std::string("newform record: ") + e.what());
    }
    return rec;
}

nlohmann::json record_to_json(const NewformRecord& rec) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["label"] = rec.label;
    j["level"] = rec.level;
    j["weight"] = 2;
    j["embedding_index"] = rec.embedding_index;
    j["atkin_lehner_sign"] = rec.atkin_lehner_sign;
    std::string norm = "arithmetic";
    nlohmann::json prov = rec.provenance.is_object() ? rec.provenance : nlohmann::json::object();
    if (prov.contains("normalization")) {
        norm = prov["normalization"].get<std::string>();
        prov.erase("normalization");
    }
    j["normalization"] = norm;
    j["source"] = to_string(rec.source);
    j["retrieved_at"] = rec.retrieved_at;
    j["provenance"] = prov;
    auto coeffs = nlohmann::ordered_json::array();
    for (const auto& [re, im] : rec.coefficient_strings) coeffs.push_back({re, im});
    j["coefficients"] = coeffs;
    return nlohmann::json::parse(j.dump());
}

std::string dump_record(const NewformRecord& rec) {
    // ordered_json keeps the field order stable in the written file.
    nlohmann::ordered_json j;
    const auto doc = record_to_json(rec);
    for (const char* key : {"schema_version", "label", "level", "weight", "embedding_index", "atkin_lehner_sign",
                            "normalization", "source", "retrieved_at", "provenance"})
        j[key] = doc.at(key);
    std::string out = j.dump(2);
    out.resize(out.size() - 2);  // "\n}"
    out += ",\n  \"coefficients\": [\n";
    for (std::size_t i = 0; i < rec.coefficient_strings.size(); ++i) {
        const auto& [re, im] = rec.coefficient_strings[i];
        out += "    [\"" + re + "\", \"" + im + "\"]";
        out += i + 1 < rec.coefficient_strings.size() ? ",\n" : "\n";
    }
    out += "  ]\n}\n";
    return out;
}

void atomic_write(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(static_cast<long long>(::getpid())) + "." +
           std::to_string(std::chrono::steady_clock::now().time_since_epoch().count());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Data, "unwritable-file", "cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error(ErrorKind::Data, "unwritable-file", "short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

LmfdbConfig lmfdb_config_from_json(const nlohmann::json& doc) {
    LmfdbConfig c;
    c.host = doc.value("host", c.host);
    c.newforms_path = doc.value("newforms_path", c.newforms_path);
    c.embeddings_path = doc.value("embeddings_path", c.embeddings_path);
    c.timeout_seconds = doc.value("timeout_seconds", c.timeout_seconds);
    return c;
}

fs::path default_fixtures_dir() {
    if (const char* env = std::getenv("HYPERBERGMAN_FIXTURES")) return env;
#ifdef HYPERBERGMAN_SOURCE_DIR
    return fs::path(HYPERBERGMAN_SOURCE_DIR) / "data" / "fixtures";
#else
    return fs::path("data") / "fixtures";
#endif
}

fs::path default_cache_dir() {
    if (const char* env = std::getenv("HYPERBERGMAN_CACHE")) return env;
    return fs::path("cache");
}

FetchOptions default_fetch_options() {
    FetchOptions o;
    o.fixtures_dir = default_fixtures_dir();
    o.cache_dir = default_cache_dir();
    return o;
}

std::vector<NewformRecord> fetch_level_network(int N, const FetchOptions& options) {
    const auto& cfg = options.lmfdb;
    httplib::Client cli(cfg.host);
    cli.set_connection_timeout(cfg.timeout_seconds, 0);
    cli.set_read_timeout(cfg.timeout_seconds, 0);
    cli.set_follow_location(true);

    const auto forms = get_json(cli, replace_all(cfg.newforms_path, "{level}", std::to_string(N)));
    if (!forms.contains("data") || !forms["data"].is_array())
        throw Error(ErrorKind::Data, "schema-mismatch", "newform listing has no data array");

    const std::string stamp = utc_now();
    std::vector<NewformRecord> out;
    try {
        for (const auto& nf : forms["data"]) {
            const std::string orbit_label = nf.at("label").get<std::string>();
            const int fricke = nf.at("fricke_eigenval").get<int>();
            const std::string code = nf.at("hecke_orbit_code").dump();
            const auto emb = get_json(cli, replace_all(cfg.embeddings_path, "{hecke_orbit_code}", code));
            if (!emb.contains("data") || !emb["data"].is_array())
                throw Error(ErrorKind::Data, "schema-mismatch", "embedding listing has no data array");
            for (const auto& row : emb["data"]) {
                NewformRecord rec;
                rec.level = N;
                rec.label = row.at("label").get<std::string>();
                rec.embedding_index = row.at("embedding_index").get<int>();
                rec.atkin_lehner_sign = fricke;
                std::size_t n = 0;
                for (const auto& pair : row.at("an_normalized")) {
                    ++n;
                    const double re = pair.at(0).get<double>();
                    const double im = pair.at(1).get<double>();
                    rec.coefficient_strings.emplace_back(shortest_repr(re), shortest_repr(im));
                    rec.coefficients.emplace_back(re * std::sqrt(static_cast<double>(n)),
                                                  im * std::sqrt(static_cast<double>(n)));
                }
                rec.source = RecordSource::Network;
                rec.retrieved_at = stamp;
                rec.provenance = {{"host", cfg.host}, {"newform", orbit_label}, {"normalization", "analytic"}};
                out.push_back(std::move(rec));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Data, "schema-mismatch", std::string("LMFDB response: ") + e.what());
    }
    std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.label < r.label; });
    return out;
}

std::vector<NewformRecord> fetch_level(int N, const FetchOptions& options) {
    if (!nt::is_prime(N)) throw Error(ErrorKind::Usage, "invalid-level", "level must be prime");
    const int g = nt::genus_x0_prime_floor(N);
    if (g < 2)
        throw Error(ErrorKind::Data, "genus-too-small",
                    "dim S_2(Gamma_0(" + std::to_string(N) + ")) = " + std::to_string(g) + " < 2");
    const std::string sub = "level" + std::to_string(N);

    auto complete = [&](const std::vector<NewformRecord>& recs) {
        if (static_cast<int>(recs.size()) != g) return false;
        return std::all_of(recs.begin(), recs.end(), [&](const NewformRecord& r) {
            return r.level == N && static_cast<int>(r.coefficients.size()) >= options.min_coefficients;
        });
    };

    if (!options.cache_dir.empty()) {
        auto recs = load_dir(options.cache_dir / sub);
        if (complete(recs)) return recs;
    }
    if (!options.fixtures_dir.empty()) {
        auto recs = load_dir(options.fixtures_dir / sub);
        if (complete(recs)) return recs;
        if (!recs.empty())
            throw Error(ErrorKind::Data, "schema-mismatch",
                        "fixture set for level " + std::to_string(N) + " is incomplete");
    }
    if (options.fixtures_only)
        throw Error(ErrorKind::Data, "network-unavailable-and-no-fixture",
                    "no cached or fixture data for level " + std::to_string(N) + " and network fetch disabled");

    std::vector<NewformRecord> recs;
    try {
        recs = fetch_level_network(N, options);
    } catch (const Error& e) {
        if (e.code() == "network-unavailable")
            throw Error(ErrorKind::Data, "network-unavailable-and-no-fixture", e.what());
        throw;
    }
    if (!complete(recs))
        throw Error(ErrorKind::Data, "schema-mismatch",
                    "network returned " + std::to_string(recs.size()) + " embeddings, expected " + std::to_string(g));
    if (!options.cache_dir.empty())
        for (const auto& r : recs) atomic_write(options.cache_dir / sub / (r.label + ".json"), dump_record(r));
    return recs;
}

AuditReport validate_records(const std::vector<NewformRecord>& records, int min_coefficients) {
    AuditReport rep;
    if (records.empty()) {
        rep.violations.push_back("no records");
        return rep;
    }
    const int N = records.front().level;
    if (!nt::is_prime(N)) rep.violations.push_back("level " + std::to_string(N) + " is not prime");
    const int g = nt::is_prime(N) ? nt::genus_x0_prime_floor(N) : -1;
    if (static_cast<int>(records.size()) != g)
        rep.violations.push_back("embedding count " + std::to_string(records.size()) + " != genus " +
                                 std::to_string(g));
    for (const auto& r : records) {
        const std::string who = r.label + ": ";
        if (r.level != N) rep.violations.push_back(who + "mixed levels");
        if (static_cast<int>(r.coefficients.size()) < min_coefficients) {
            rep.violations.push_back(who + "truncation " + std::to_string(r.coefficients.size()) + " below minimum " +
                                     std::to_string(min_coefficients));
        }
        if (r.coefficients.empty()) continue;
        if (std::abs(r.coefficients[0] - std::complex<double>(1.0, 0.0)) > 1e-9)
            rep.violations.push_back(who + "a_1 is not 1");
        if (r.atkin_lehner_sign != 1 && r.atkin_lehner_sign != -1)
            rep.violations.push_back(who + "Atkin-Lehner sign is not +-1");
        for (std::size_t i = 0; i < r.coefficients.size(); ++i) {
            const auto n = static_cast<std::int64_t>(i + 1);
            const double bound = nt::divisor_count(n) * std::sqrt(static_cast<double>(n)) + 1e-6;
            if (std::abs(r.coefficients[i]) > bound) {
                rep.violations.push_back(who + "a_" + std::to_string(n) + " exceeds the Deligne bound");
                break;
            }
        }
        if (static_cast<int>(r.coefficients.size()) >= N) {
            const auto aN = r.coefficients[static_cast<std::size_t>(N - 1)];
            if (std::abs(aN + std::complex<double>(r.atkin_lehner_sign, 0.0)) > 1e-6)
                rep.violations.push_back(who + "a_N does not equal minus the Fricke sign");
        }
    }
    return rep;
}

}  // namespace hyperbergman

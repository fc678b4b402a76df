#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperbergman/hplane.hpp"
#include "hyperbergman/sl2z.hpp"

namespace hyperbergman {

enum class GroupKind { SurfaceGroup, Congruence, CyclicTest };

std::string to_string(GroupKind kind);
GroupKind group_kind_from_string(const std::string& s);

/// Finite generator presentation of a Fuchsian group.
///
/// `generators` is closed under inverses: inverses missing from the input are
/// synthesized by make_group(). `probe_points` are the base points used for
/// systole searches, and `core_radius` bounds the distance from a probe point
/// to a region every closed geodesic must cross (used for certification of
/// non-arithmetic groups).
struct FuchsianGroup {
    std::string name;
    GroupKind kind = GroupKind::SurfaceGroup;
    int level = 0;  // congruence level N, 0 if not a Gamma_0(N)
    int genus = 0;  // genus of the quotient when meaningful, else 0
    std::vector<Mobius> generators;
    std::vector<std::string> labels;
    std::vector<bool> parabolic;
    std::vector<HPoint> probe_points;
    std::optional<double> core_radius;
    double default_search_radius = 4.0;
};

/// Validates generators and synthesizes inverses. Parabolic generators are
/// only accepted for congruence groups, where they are flagged.
FuchsianGroup make_group(std::string name, GroupKind kind, const std::vector<Mobius>& generators,
                         std::vector<std::string> labels);

/// Built-in groups: "cyclic-test", "bolza", "gamma0-N" for prime N.
FuchsianGroup builtin_group(const std::string& name);

/// JSON presentation {"kind", "generators": [[a,b,c,d],...], "labels", ...}.
FuchsianGroup group_from_json(const nlohmann::json& doc);
nlohmann::json group_to_json(const FuchsianGroup& group);

/// Schreier generators of Gamma_0(N) from the coset permutation action of
/// S and T on P^1(Z/N). Returned up to sign, without inverse duplicates.
std::vector<SL2Z> gamma0_generators(std::int64_t N);

/// Index of the coset Gamma_0(N) g in SL2(Z), keyed by the bottom row (c : d)
/// of g in P^1(Z/N): 0 for (0 : 1), 1 + d/c mod N otherwise.
std::int64_t gamma0_coset_index(std::int64_t c, std::int64_t d, std::int64_t N);

/// Coset representative for gamma0_coset_index k: identity for 0, S T^(k-1) otherwise.
SL2Z gamma0_coset_rep(std::int64_t k);

struct OrbitRecord {
    Mobius gamma;
    double rho;  // d(z1, gamma z2)
    std::string word;
};

/// All group elements moving z2 to within `radius` of z1.
struct OrbitBall {
    HPoint z1;
    HPoint z2;
    double radius = 0.0;
    std::vector<OrbitRecord> records;  // sorted by rho
    bool complete = false;
    std::size_t audit_merges = 0;  // false splits removed by the duplicate audit
};

struct BallOptions {
    std::size_t budget = 4'000'000;
    int jobs = 1;
};

/// Ball enumeration. Congruence groups with a known level use the exact
/// arithmetic enumeration; everything else uses breadth-first word expansion.
OrbitBall enumerate_ball(const FuchsianGroup& group, const HPoint& z1, const HPoint& z2, double radius,
                         const BallOptions& options = {});

/// Breadth-first word expansion around an anchor a (z2, or the probe point
/// giving the smallest expansion radius). A word w is expanded only while
/// d(a, w a) <= radius + d(a, z1) + d(a, z2) + 2 * max_s d(a, s a). The result
/// is marked complete when the frontier is exhausted within the budget.
OrbitBall enumerate_ball_words(const FuchsianGroup& group, const HPoint& z1, const HPoint& z2, double radius,
                               const BallOptions& options = {});

/// Exact enumeration of {gamma in Gamma_0(N) : d(z1, gamma z2) <= radius}
/// by bounding the integer entries through 2 cosh d = ||A1^-1 gamma A2||_F^2.
OrbitBall enumerate_congruence_ball(std::int64_t N, const HPoint& z1, const HPoint& z2, double radius);

/// N_Gamma(z1, z2; rho) sampled at the given thresholds.
struct CountProfile {
    std::vector<double> thresholds;
    std::vector<std::size_t> counts;
};

CountProfile count_profile(const OrbitBall& ball, const std::vector<double>& thresholds);

/// Profile whose thresholds are exactly the distinct rho values of the ball,
/// so Stieltjes sums against it are exact.
CountProfile atom_profile(const OrbitBall& ball);

struct SurfaceGeometry {
    double systole = 0.0;
    double injectivity_radius = 0.0;
    int genus = 0;
    double hyp_volume = 0.0;  // 4 pi (g - 1); 0 when genus < 2
    bool certified = false;
    double shortest_trace = 0.0;
    Mobius witness;
    std::string certificate;
};

/// Volume 4 pi (g - 1) of a closed hyperbolic surface of genus g >= 2.
double hyperbolic_volume(int genus);

/// Builds a geometry record by hand, e.g. for synthetic tests.
SurfaceGeometry make_geometry(double systole, int genus);

/// Shortest closed geodesic, 2 arccosh(|tr|/2) minimized over the hyperbolic
/// elements in balls of `search_radius` around the probe points.
///
/// Congruence groups are certified by the trace-residue argument: every
/// element of Gamma_0(N) has ad = 1 mod N, so trace t occurs only if t^2 - 4
/// is a square mod N. Other groups are certified when the ball is complete
/// and the shortest length is at most search_radius - 2 * core_radius.
SurfaceGeometry systole(const FuchsianGroup& group, std::optional<double> search_radius = std::nullopt,
                        bool require_certificate = true, const BallOptions& options = {});

/// The injectivity radius under the convention r_X = systole.
double injectivity_radius(const SurfaceGeometry& geom);

/// min over nonidentity gamma of d(z, gamma z), from a ball of the given radius.
/// Returns +inf when the ball holds only the identity.
double pointwise_displacement(const FuchsianGroup& group, const HPoint& z, double radius,
                              const BallOptions& options = {});

/// Deterministic sample of the Dirichlet octagon of the Bolza group around i.
std::vector<HPoint> bolza_octagon_samples(int radial, int angular);

}  // namespace hyperbergman

#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Weight-2 modular symbols for Gamma_0(N), N prime. Used to generate the
// newform fixtures offline; the rest of the library only reads fixtures.
namespace hyperbergman::modsym {

/// Integer matrix [[a, b], [c, d]] of determinant n (Merel's Heilbronn set).
struct Heilbronn {
    std::int64_t a, b, c, d;
};

/// {[[a,b],[c,d]] : ad - bc = n, a > b >= 0, d > c >= 0}.
std::vector<Heilbronn> heilbronn_merel(std::int64_t n);

/// The plus quotient of the space of weight-2 Manin symbols for Gamma_0(N).
///
/// Manin symbols are indexed by P^1(Z/N): 0 for (0 : 1), 1 + d/c mod N for
/// (c : d) with c != 0. Relations x + xS = 0, x + x tau + x tau^2 = 0 and
/// x = x* (the star involution (c : d) -> (-c : d)) are solved exactly.
class PlusSpace {
public:
    explicit PlusSpace(std::int64_t N);

    std::int64_t level() const { return N_; }
    int dimension() const { return dim_; }

    /// Hecke operator T_n (U_n when n | N) on the quotient, as a dense
    /// row-major dim x dim matrix acting on column vectors.
    std::vector<double> hecke_matrix(std::int64_t n) const;

private:
    std::int64_t index(std::int64_t c, std::int64_t d) const;  // -1 if not in P^1

    std::int64_t N_;
    int dim_ = 0;
    std::int64_t denom_ = 1;
    std::vector<std::vector<std::int64_t>> image_;  // symbol -> denom * coordinates
    std::vector<std::int64_t> basis_symbols_;       // free symbols spanning the quotient
};

/// One complex embedding of a weight-2 newform.
struct NewformEmbedding {
    std::string label;   // "N.2.a.<orbit>.1.<embedding>"
    std::int64_t level;
    int orbit;           // 0-based Galois orbit index
    int orbit_dim;
    int embedding;       // 1-based within the orbit
    int fricke_sign;     // eigenvalue of f -> f|W_N, equals -a_N
    std::vector<double> coefficients;  // a_1 .. a_M (real for trivial character)
};

/// All newform embeddings of level N (prime) with M coefficients, computed
/// from Hecke eigenvectors on the cuspidal part of the plus quotient.
std::vector<NewformEmbedding> newforms(std::int64_t N, int M);

/// Orbit letter for 0-based index: 0 -> "a", 25 -> "z", 26 -> "ba".
std::string orbit_letters(int index);

}  // namespace hyperbergman::modsym

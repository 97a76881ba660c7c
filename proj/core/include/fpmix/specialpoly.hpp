#ifndef FPMIX_SPECIALPOLY_HPP
#define FPMIX_SPECIALPOLY_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "fpmix/errors.hpp"
#include "fpmix/multilaurent.hpp"
#include "fpmix/prime_family.hpp"
#include "fpmix/unipoly.hpp"

namespace fpmix {

// A multivariate Laurent polynomial whose variable i stands for family
// member i. "Special" means it vanishes when each variable is replaced by
// its polynomial.
struct SpecialCandidate {
    MultiLaurent gamma;
    PrimeFamily family;
};

// x_i -> family[i](x). Negative exponents are accepted only in directions
// whose polynomial is the monomial x (then they move into the Laurent
// offset); elsewhere they are rejected.
LaurentUniPoly substitute(const MultiLaurent& gamma, const PrimeFamily& family);

// substitute == 0, after clearing negative exponents by a unit monomial
bool is_special(const MultiLaurent& gamma, const PrimeFamily& family);

// alpha-homogeneous pieces: gamma = sum of components, component(alpha) has
// all exponents congruent to alpha mod p
std::map<std::vector<uint8_t>, MultiLaurent> homogeneous_split(const MultiLaurent& gamma);

// x^-alpha * component (all exponents divisible by p)
MultiLaurent bar_component(const MultiLaurent& comp, const std::vector<uint8_t>& alpha);

// componentwise 0 -> 0, g -> p - g
std::vector<uint8_t> u_complement(const std::vector<uint8_t>& beta, uint32_t p);

// Monomial image of the prime factorization: U = c * prod rho^e maps to
// c * prod x_rho^e. New primes are appended to the family.
MultiLaurent psi_map(const UniPoly& u, PrimeFamily& family);
MultiLaurent psi_map(const QOnePoly& q, PrimeFamily& family);

// One Lemma-style telescoping term of psi(U) - U:
// coeff * cofactor(x) * shift_monomial * (x_prime - prime(x)).
struct BsTerm {
    uint32_t coeff;
    Exps shift;
    int prime;       // family index
    UniPoly cofactor;
};
std::vector<BsTerm> basic_shift_decompose(const UniPoly& u, PrimeFamily& family);

// derivative-of-product operators attached to a residue vector beta
struct DerivedOperators {
    QOnePoly a, b, pi;
};
DerivedOperators derived_operators(const MultiLaurent& gamma, const PrimeFamily& family,
                                   const std::vector<uint8_t>& beta);

// family closed once under prime factors of derivatives of its sub-products
PrimeFamily zeta_family(const PrimeFamily& family, uint64_t budget = 1u << 22);

// Shifted, p-power-dilated basic special polynomial:
// coeff * x^shift * (x_prime - prime(x))^(p^t). coeff > 1 is shorthand for
// that many repeated parts.
struct GbsPart {
    uint32_t coeff = 1;
    Exps shift;
    int t = 0;
    int prime = 0;
};
QOnePoly expand_part(const GbsPart& g, const PrimeFamily& family, int nvars);
QOnePoly expand_parts(const std::vector<GbsPart>& parts, const PrimeFamily& family, int nvars);

// Exact gbs expansion of a polynomial with univariate coefficients that
// vanishes under substitution. Bounded search; throws if the candidate
// ladder is exhausted (which signals a bug upstream, not a valid outcome).
std::vector<GbsPart> strict_expand(const QOnePoly& target, PrimeFamily& family);

struct OneStepResult {
    MultiLaurent a_tilde, b_tilde; // over the (possibly) extended family
    MultiLaurent multiplier;       // psi of the derivative monomial
    std::vector<GbsPart> corrections;
    int measured_c = 1; // largest per-generator part count seen
};
// Balance: multiplier * gamma == a_tilde + b_tilde + sum(corrections),
// with strictly fewer terms in each of a_tilde, b_tilde.
OneStepResult one_step(const MultiLaurent& gamma, PrimeFamily& family,
                       const std::vector<uint8_t>& beta);

struct Decomposition {
    std::vector<GbsPart> parts;
    PrimeFamily closure_family;             // primes used by the parts
    std::vector<MultiLaurent> monomial_divisors; // psi multipliers divided out
    std::vector<std::pair<Exps, int>> pth_root_log; // (shift, t) extractions
    bool certificate = false;               // resummation verified
    size_t recursion_bound = 0;             // parts(r) <= 2 parts(r-1) + 3 C r
};
Decomposition decompose(const MultiLaurent& gamma, const PrimeFamily& family);

// entry point for monic but not necessarily prime members: reduces to the
// prime case first; the resummation certificate then refers to the reduced
// polynomial, which is also returned
struct GeneralDecomposition {
    Decomposition dec;
    SpecialCandidate reduced;
};
GeneralDecomposition decompose_general(const MultiLaurent& gamma,
                                       const std::vector<UniPoly>& members, uint32_t p);

// reduction to the prime case for a family of monic, not necessarily prime,
// polynomials: exponents push forward along the factorizations
SpecialCandidate check_map(const MultiLaurent& gamma, const std::vector<UniPoly>& family,
                           uint32_t p);

// split into special parts with disjoint supports, each with no proper
// special sub-sum; subset search, length capped
std::vector<MultiLaurent> minimal_split(const MultiLaurent& gamma, const PrimeFamily& family,
                                        size_t max_len = 12);

} // namespace fpmix

#endif

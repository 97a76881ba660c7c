#ifndef FPMIX_TRANSFER_HPP
#define FPMIX_TRANSFER_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "fpmix/dynamics.hpp"
#include "fpmix/unipoly.hpp"

namespace fpmix {

// endomorphism of the one-sided configuration group given by a polynomial;
// a monomial gives an automorphism, anything else is exact
struct TransferSpec {
    UniPoly r;
    bool monomial = false;

    explicit TransferSpec(UniPoly poly) : r(std::move(poly)) {
        if (r.is_zero() || r.is_constant())
            throw std::invalid_argument("TransferSpec: polynomial must have degree >= 1");
        monomial = r.is_monomial();
    }
};

// composition operator on the character span: Q -> R Q
TrigPoly compose_apply(const TransferSpec& spec, const TrigPoly& f);

// n-fold transfer operator: each character Q maps to Q / R^n when R^n
// divides Q (as a Laurent polynomial) and drops otherwise
TrigPoly transfer_apply(const TransferSpec& spec, const TrigPoly& f, int n);

// smallest n with Pi^n chi_Q = 0; equals the multiplicity of R in Q plus one
int exactness_index(const TransferSpec& spec, const LaurentUniPoly& q);

struct CommutationResult {
    bool commuting = false;
    UniPoly bezout_u, bezout_v; // u r1 + v r2 = gcd
    UniPoly gcd_poly;
    bool char_level_ok = false; // operator identity on all characters up to the bound
    int chars_checked = 0;
};
CommutationResult complete_commutation(const UniPoly& r1, const UniPoly& r2,
                                       int char_degree_bound = 10);

// sup norm over the finite group of window configurations
double sup_norm(const TrigPoly& f, uint64_t budget = 1ull << 22);

std::complex<double> char_inner(const TrigPoly& a, const TrigPoly& b);

// V_n: largest change of f under flips of coordinates outside [-n, n]
double variation_profile(const TrigPoly& f, int n, uint64_t budget = 1ull << 22);

struct DecayReport {
    std::vector<double> vn;      // V_1 .. V_nmax
    std::vector<double> pin_sup; // ||Pi^n f||_inf for n = 0 .. nmax
    double fitted_rate = 0.0;    // log-slope of the sup norms
    double fitted_c = 0.0;
    bool rate_ok = false;        // fitted rate within tolerance of log(lambda)
};
DecayReport regularity_check(const TrigPoly& f, const UniPoly& r, double lambda, int nmax,
                             double slope_tol = 0.15);

} // namespace fpmix

#endif

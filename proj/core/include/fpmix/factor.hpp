#ifndef FPMIX_FACTOR_HPP
#define FPMIX_FACTOR_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "fpmix/unipoly.hpp"

namespace fpmix {

struct Factorization {
    uint32_t unit = 1;                              // leading unit c(U)
    std::vector<std::pair<UniPoly, int>> primes;    // monic prime -> multiplicity, sorted
};

// Factor a nonzero univariate polynomial into monic primes times a unit.
// Squarefree split via gcd(U, U') with p-th-root descent, then
// distinct-degree / equal-degree splitting; plain trial division for small
// degrees. Equal-degree splitting draws from a fixed-seed generator, so the
// result order is reproducible.
Factorization factor_monic_primes(const UniPoly& u);

bool is_irreducible(const UniPoly& u);

// product of unit and prime powers (for verification)
UniPoly expand(const Factorization& f, uint32_t p);

} // namespace fpmix

#endif

#ifndef FPMIX_PRIME_FAMILY_HPP
#define FPMIX_PRIME_FAMILY_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpmix/factor.hpp"
#include "fpmix/unipoly.hpp"

namespace fpmix {

// Ordered family of distinct monic prime polynomials; the polynomial x is
// always a member (appended if the caller left it out). Variable i of a
// multivariate polynomial corresponds to member i. The family is append-only
// so variable indices stay stable while a computation enlarges it.
class PrimeFamily {
  public:
    PrimeFamily(uint32_t p, std::vector<UniPoly> members) : p_(p) {
        if (!is_prime_u32(p)) throw std::invalid_argument("PrimeFamily: modulus must be prime");
        for (auto& m : members) push(std::move(m));
        if (!index_of(UniPoly::x(p_))) push(UniPoly::x(p_));
    }

    uint32_t modulus() const { return p_; }
    int size() const { return static_cast<int>(members_.size()); }
    const UniPoly& at(int i) const { return members_.at(static_cast<size_t>(i)); }
    const std::vector<UniPoly>& members() const { return members_; }

    std::optional<int> index_of(const UniPoly& q) const {
        for (size_t i = 0; i < members_.size(); ++i)
            if (members_[i] == q) return static_cast<int>(i);
        return std::nullopt;
    }

    // index of q, appending it first if new
    int extend(const UniPoly& q) {
        if (auto i = index_of(q)) return *i;
        push(q);
        return size() - 1;
    }

    friend bool operator==(const PrimeFamily& a, const PrimeFamily& b) {
        return a.p_ == b.p_ && a.members_ == b.members_;
    }

    std::vector<std::string> labels() const;

  private:
    void push(UniPoly m) {
        if (m.modulus() != p_) throw std::invalid_argument("PrimeFamily: modulus mismatch");
        if (m.is_zero() || m.is_constant()) throw std::invalid_argument("PrimeFamily: members must have degree >= 1");
        if (!m.is_monic()) throw std::invalid_argument("PrimeFamily: members must be monic");
        if (!is_irreducible(m)) throw std::invalid_argument("PrimeFamily: members must be irreducible");
        if (index_of(m)) throw std::invalid_argument("PrimeFamily: duplicate member");
        members_.push_back(std::move(m));
    }

    uint32_t p_;
    std::vector<UniPoly> members_;
};

} // namespace fpmix

#endif

#ifndef FPMIX_UNIPOLY_HPP
#define FPMIX_UNIPOLY_HPP

#include <cassert>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpmix/fp.hpp"

namespace fpmix {

// Dense univariate polynomial over F_p. Coefficients ascending by degree,
// trailing zeros trimmed. The zero polynomial has an empty coefficient
// vector; its degree is the disengaged optional, never a number.
class UniPoly {
  public:
    UniPoly() = default;
    explicit UniPoly(uint32_t p) : p_(p) { check_modulus(); }
    UniPoly(uint32_t p, std::vector<uint32_t> coeffs) : p_(p), c_(std::move(coeffs)) {
        check_modulus();
        for (auto& c : c_) c %= p_;
        trim();
    }

    static UniPoly zero(uint32_t p) { return UniPoly(p); }
    static UniPoly one(uint32_t p) { return constant(p, 1); }
    static UniPoly x(uint32_t p) { return UniPoly(p, {0, 1}); }
    static UniPoly constant(uint32_t p, uint32_t c) { return UniPoly(p, {c}); }
    static UniPoly monomial(uint32_t p, int deg, uint32_t c = 1) {
        if (deg < 0) throw std::invalid_argument("UniPoly::monomial: negative degree");
        std::vector<uint32_t> v(static_cast<size_t>(deg) + 1, 0);
        v.back() = c;
        return UniPoly(p, std::move(v));
    }

    uint32_t modulus() const { return p_; }
    bool is_zero() const { return c_.empty(); }
    bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
    bool is_constant() const { return c_.size() <= 1; }
    std::optional<int> degree() const {
        if (c_.empty()) return std::nullopt;
        return static_cast<int>(c_.size()) - 1;
    }
    int degree_or(int fallback) const { return c_.empty() ? fallback : static_cast<int>(c_.size()) - 1; }
    uint32_t coeff(size_t i) const { return i < c_.size() ? c_[i] : 0; }
    const std::vector<uint32_t>& coeffs() const { return c_; }
    uint32_t leading() const {
        if (c_.empty()) throw std::domain_error("leading coefficient of zero polynomial");
        return c_.back();
    }
    uint32_t constant_term() const { return coeff(0); }
    bool is_monic() const { return !c_.empty() && c_.back() == 1; }
    bool is_monomial() const {
        if (c_.empty()) return false;
        for (size_t i = 0; i + 1 < c_.size(); ++i)
            if (c_[i]) return false;
        return true;
    }

    friend bool operator==(const UniPoly& a, const UniPoly& b) {
        return a.p_ == b.p_ && a.c_ == b.c_;
    }
    // total order for use as map key (modulus, degree, then coefficients)
    friend bool operator<(const UniPoly& a, const UniPoly& b) {
        if (a.p_ != b.p_) return a.p_ < b.p_;
        if (a.c_.size() != b.c_.size()) return a.c_.size() < b.c_.size();
        for (size_t i = a.c_.size(); i-- > 0;)
            if (a.c_[i] != b.c_[i]) return a.c_[i] < b.c_[i];
        return false;
    }

    friend UniPoly operator+(const UniPoly& a, const UniPoly& b) {
        a.check(b);
        std::vector<uint32_t> r(std::max(a.c_.size(), b.c_.size()), 0);
        for (size_t i = 0; i < r.size(); ++i) r[i] = fp_add(a.coeff(i), b.coeff(i), a.p_);
        return UniPoly(a.p_, std::move(r));
    }
    friend UniPoly operator-(const UniPoly& a, const UniPoly& b) {
        a.check(b);
        std::vector<uint32_t> r(std::max(a.c_.size(), b.c_.size()), 0);
        for (size_t i = 0; i < r.size(); ++i) r[i] = fp_sub(a.coeff(i), b.coeff(i), a.p_);
        return UniPoly(a.p_, std::move(r));
    }
    friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
        a.check(b);
        if (a.is_zero() || b.is_zero()) return zero(a.p_);
        std::vector<uint64_t> acc(a.c_.size() + b.c_.size() - 1, 0);
        for (size_t i = 0; i < a.c_.size(); ++i) {
            if (!a.c_[i]) continue;
            for (size_t j = 0; j < b.c_.size(); ++j) {
                acc[i + j] += static_cast<uint64_t>(a.c_[i]) * b.c_[j];
                if (acc[i + j] >> 62) acc[i + j] %= a.p_;
            }
        }
        std::vector<uint32_t> r(acc.size());
        for (size_t i = 0; i < acc.size(); ++i) r[i] = static_cast<uint32_t>(acc[i] % a.p_);
        return UniPoly(a.p_, std::move(r));
    }
    UniPoly operator-() const {
        std::vector<uint32_t> r(c_.size());
        for (size_t i = 0; i < c_.size(); ++i) r[i] = fp_neg(c_[i], p_);
        return UniPoly(p_, std::move(r));
    }
    UniPoly scaled(uint32_t s) const {
        std::vector<uint32_t> r(c_.size());
        for (size_t i = 0; i < c_.size(); ++i) r[i] = fp_mul(c_[i], s, p_);
        return UniPoly(p_, std::move(r));
    }
    UniPoly shifted(int k) const { // multiply by x^k, k >= 0
        if (is_zero()) return *this;
        std::vector<uint32_t> r(c_.size() + static_cast<size_t>(k), 0);
        for (size_t i = 0; i < c_.size(); ++i) r[i + k] = c_[i];
        return UniPoly(p_, std::move(r));
    }

    UniPoly pow(uint64_t e) const {
        UniPoly r = one(p_), b = *this;
        while (e) {
            if (e & 1) r = r * b;
            if (e >>= 1) b = b * b;
        }
        return r;
    }
    // (sum c_i x^i)^(p^t) = sum c_i x^(i p^t); Frobenius shortcut
    UniPoly frobenius(unsigned t) const {
        if (t == 0 || is_zero()) return *this;
        uint64_t q = 1;
        for (unsigned i = 0; i < t; ++i) q *= p_;
        std::vector<uint32_t> r((c_.size() - 1) * q + 1, 0);
        for (size_t i = 0; i < c_.size(); ++i) r[i * q] = c_[i];
        return UniPoly(p_, std::move(r));
    }

    UniPoly derivative() const {
        if (c_.size() <= 1) return zero(p_);
        std::vector<uint32_t> r(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i) r[i - 1] = fp_mul(c_[i], static_cast<uint32_t>(i % p_), p_);
        return UniPoly(p_, std::move(r));
    }

    // U with U^p = *this, when the exponents and coefficients permit.
    std::optional<UniPoly> pth_root() const {
        if (is_zero()) return zero(p_);
        std::vector<uint32_t> r((c_.size() - 1) / p_ + 1, 0);
        for (size_t i = 0; i < c_.size(); ++i) {
            if (!c_[i]) continue;
            if (i % p_) return std::nullopt;
            r[i / p_] = c_[i]; // c^(1/p) = c in F_p
        }
        return UniPoly(p_, std::move(r));
    }

    struct DivRem;
    DivRem divrem(const UniPoly& d) const;
    bool divides(const UniPoly& num) const;
    // largest k with d^k | *this (input nonzero, d non-constant)
    int multiplicity_of(const UniPoly& d) const;

    uint32_t eval(uint32_t at) const {
        uint64_t acc = 0;
        for (size_t i = c_.size(); i-- > 0;) acc = (acc * at + c_[i]) % p_;
        return static_cast<uint32_t>(acc);
    }

    UniPoly monic_part(uint32_t* unit = nullptr) const {
        if (is_zero()) throw std::domain_error("monic_part of zero polynomial");
        uint32_t u = leading();
        if (unit) *unit = u;
        return scaled(fp_inv(u, p_));
    }

    friend UniPoly gcd(UniPoly a, UniPoly b);

    std::string to_string(const std::string& var = "x") const;

  private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    void check(const UniPoly& o) const {
        if (p_ != o.p_) throw std::invalid_argument("UniPoly: modulus mismatch");
    }
    void check_modulus() const {
        if (!is_prime_u32(p_)) throw std::invalid_argument("UniPoly: modulus must be prime");
    }

    uint32_t p_ = 2;
    std::vector<uint32_t> c_;
};

struct UniPoly::DivRem {
    UniPoly q, r;
};

inline UniPoly::DivRem UniPoly::divrem(const UniPoly& d) const {
    check(d);
    if (d.is_zero()) throw std::domain_error("UniPoly: division by zero");
    UniPoly r = *this;
    const int dd = *d.degree();
    const uint32_t lead_inv = fp_inv(d.leading(), p_);
    std::vector<uint32_t> qc;
    if (!r.is_zero() && *r.degree() >= dd) qc.assign(static_cast<size_t>(*r.degree() - dd) + 1, 0);
    while (!r.is_zero() && *r.degree() >= dd) {
        int k = *r.degree() - dd;
        uint32_t f = fp_mul(r.leading(), lead_inv, p_);
        qc[static_cast<size_t>(k)] = f;
        std::vector<uint32_t> rc = r.c_;
        for (size_t i = 0; i < d.c_.size(); ++i)
            rc[i + static_cast<size_t>(k)] = fp_sub(rc[i + static_cast<size_t>(k)], fp_mul(f, d.c_[i], p_), p_);
        r = UniPoly(p_, std::move(rc));
    }
    return {UniPoly(p_, std::move(qc)), r};
}

inline bool UniPoly::divides(const UniPoly& num) const { return num.divrem(*this).r.is_zero(); }

inline int UniPoly::multiplicity_of(const UniPoly& d) const {
    if (is_zero() || d.is_constant()) throw std::domain_error("multiplicity_of: bad arguments");
    int k = 0;
    UniPoly cur = *this;
    while (true) {
        auto dr = cur.divrem(d);
        if (!dr.r.is_zero()) return k;
        cur = dr.q;
        ++k;
    }
}

inline UniPoly gcd(UniPoly a, UniPoly b) {
    a.check(b);
    while (!b.is_zero()) {
        UniPoly r = a.divrem(b).r;
        a = std::move(b);
        b = std::move(r);
    }
    if (a.is_zero()) return a;
    return a.monic_part();
}

// Laurent polynomial x^offset * base where base has a nonzero constant term
// (offset is then canonical). Zero is represented by a zero base.
struct LaurentUniPoly {
    UniPoly base;
    int offset = 0;

    LaurentUniPoly() = default;
    explicit LaurentUniPoly(UniPoly b, int off = 0) { assign(std::move(b), off); }

    static LaurentUniPoly zero(uint32_t p) { return LaurentUniPoly(UniPoly::zero(p)); }
    static LaurentUniPoly one(uint32_t p) { return LaurentUniPoly(UniPoly::one(p)); }

    uint32_t modulus() const { return base.modulus(); }
    bool is_zero() const { return base.is_zero(); }

    friend bool operator==(const LaurentUniPoly& a, const LaurentUniPoly& b) = default;
    friend bool operator<(const LaurentUniPoly& a, const LaurentUniPoly& b) {
        if (a.offset != b.offset) return a.offset < b.offset;
        return a.base < b.base;
    }

    friend LaurentUniPoly operator*(const LaurentUniPoly& a, const LaurentUniPoly& b) {
        return LaurentUniPoly(a.base * b.base, a.offset + b.offset);
    }
    friend LaurentUniPoly operator+(const LaurentUniPoly& a, const LaurentUniPoly& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        int lo = std::min(a.offset, b.offset);
        return LaurentUniPoly(a.base.shifted(a.offset - lo) + b.base.shifted(b.offset - lo), lo);
    }
    friend LaurentUniPoly operator-(const LaurentUniPoly& a, const LaurentUniPoly& b) {
        if (b.is_zero()) return a;
        if (a.is_zero()) return LaurentUniPoly(-b.base, b.offset);
        int lo = std::min(a.offset, b.offset);
        return LaurentUniPoly(a.base.shifted(a.offset - lo) - b.base.shifted(b.offset - lo), lo);
    }

    std::string to_string(const std::string& var = "x") const;

  private:
    void assign(UniPoly b, int off) {
        if (b.is_zero()) {
            base = std::move(b);
            offset = 0;
            return;
        }
        size_t k = 0;
        while (b.coeff(k) == 0) ++k;
        if (k > 0) {
            std::vector<uint32_t> c(b.coeffs().begin() + k, b.coeffs().end());
            b = UniPoly(b.modulus(), std::move(c));
        }
        base = std::move(b);
        offset = off + static_cast<int>(k);
    }
};

// x^shift * tilde reproduces R, tilde with nonzero constant term.
struct LaurentNormalForm {
    int shift;
    UniPoly tilde;
};
inline LaurentNormalForm normalize_laurent(const LaurentUniPoly& r) {
    if (r.is_zero()) throw std::domain_error("normalize_laurent: zero input");
    return {r.offset, r.base};
}

} // namespace fpmix

#endif

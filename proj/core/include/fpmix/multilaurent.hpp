#ifndef FPMIX_MULTILAURENT_HPP
#define FPMIX_MULTILAURENT_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpmix/fp.hpp"
#include "fpmix/unipoly.hpp"

namespace fpmix {

using Exps = std::vector<int32_t>;

// Sparse multivariate Laurent polynomial over F_p in a fixed number of
// variables. Terms are kept reduced (no zero coefficients) and ordered
// lexicographically on exponent tuples, which fixes the serialization order.
class MultiLaurent {
  public:
    MultiLaurent() = default;
    MultiLaurent(uint32_t p, int nvars) : p_(p), n_(nvars) {
        if (!is_prime_u32(p)) throw std::invalid_argument("MultiLaurent: modulus must be prime");
    }

    static MultiLaurent monomial(uint32_t p, Exps e, uint32_t c = 1) {
        MultiLaurent m(p, static_cast<int>(e.size()));
        m.add_term(std::move(e), c);
        return m;
    }

    uint32_t modulus() const { return p_; }
    int nvars() const { return n_; }
    bool is_zero() const { return t_.empty(); }
    size_t length() const { return t_.size(); }
    const std::map<Exps, uint32_t>& terms() const { return t_; }

    void add_term(Exps e, uint32_t c) {
        if (static_cast<int>(e.size()) != n_) throw std::invalid_argument("MultiLaurent: arity mismatch");
        c %= p_;
        if (!c) return;
        auto [it, fresh] = t_.try_emplace(std::move(e), c);
        if (!fresh) {
            it->second = fp_add(it->second, c, p_);
            if (!it->second) t_.erase(it);
        }
    }

    friend MultiLaurent operator+(const MultiLaurent& a, const MultiLaurent& b) {
        a.check(b);
        MultiLaurent r = a;
        for (const auto& [e, c] : b.t_) r.add_term(e, c);
        return r;
    }
    friend MultiLaurent operator-(const MultiLaurent& a, const MultiLaurent& b) {
        a.check(b);
        MultiLaurent r = a;
        for (const auto& [e, c] : b.t_) r.add_term(e, fp_neg(c, a.p_));
        return r;
    }
    friend MultiLaurent operator*(const MultiLaurent& a, const MultiLaurent& b) {
        a.check(b);
        MultiLaurent r(a.p_, a.n_);
        for (const auto& [ea, ca] : a.t_)
            for (const auto& [eb, cb] : b.t_) {
                Exps e(a.n_);
                for (int i = 0; i < a.n_; ++i) e[i] = ea[i] + eb[i];
                r.add_term(std::move(e), fp_mul(ca, cb, a.p_));
            }
        return r;
    }
    MultiLaurent scaled(uint32_t s) const {
        MultiLaurent r(p_, n_);
        for (const auto& [e, c] : t_) r.add_term(e, fp_mul(c, s, p_));
        return r;
    }
    MultiLaurent negated() const { return scaled(p_ - 1); }
    MultiLaurent shifted(const Exps& s) const { // multiply by x^s
        MultiLaurent r(p_, n_);
        for (const auto& [e, c] : t_) {
            Exps e2(n_);
            for (int i = 0; i < n_; ++i) e2[i] = e[i] + s[i];
            r.add_term(std::move(e2), c);
        }
        return r;
    }
    // Frobenius power: exponents scaled by p^t (coefficients fixed by c^p = c)
    MultiLaurent frobenius(unsigned t) const {
        if (t == 0) return *this;
        int64_t q = 1;
        for (unsigned i = 0; i < t; ++i) q *= p_;
        MultiLaurent r(p_, n_);
        for (const auto& [e, c] : t_) {
            Exps e2(n_);
            for (int i = 0; i < n_; ++i) e2[i] = static_cast<int32_t>(e[i] * q);
            r.add_term(std::move(e2), c);
        }
        return r;
    }
    MultiLaurent embedded(int nvars) const { // append zero-exponent variables
        if (nvars < n_) throw std::invalid_argument("MultiLaurent: cannot shrink arity");
        MultiLaurent r(p_, nvars);
        for (const auto& [e, c] : t_) {
            Exps e2(nvars, 0);
            for (int i = 0; i < n_; ++i) e2[i] = e[i];
            r.add_term(std::move(e2), c);
        }
        return r;
    }

    friend bool operator==(const MultiLaurent& a, const MultiLaurent& b) = default;

    Exps min_exponents() const {
        if (t_.empty()) throw std::domain_error("min_exponents of zero polynomial");
        Exps m = t_.begin()->first;
        for (const auto& [e, c] : t_)
            for (int i = 0; i < n_; ++i) m[i] = std::min(m[i], e[i]);
        return m;
    }

    std::string to_string(const std::vector<std::string>& names = {}) const;

  private:
    void check(const MultiLaurent& o) const {
        if (p_ != o.p_ || n_ != o.n_) throw std::invalid_argument("MultiLaurent: modulus/arity mismatch");
    }
    uint32_t p_ = 2;
    int n_ = 0;
    std::map<Exps, uint32_t> t_;
};

// Polynomial in the family variables with univariate coefficients in F_p[x].
class QOnePoly {
  public:
    QOnePoly() = default;
    QOnePoly(uint32_t p, int nvars) : p_(p), n_(nvars) {}
    explicit QOnePoly(const MultiLaurent& m) : p_(m.modulus()), n_(m.nvars()) {
        for (const auto& [e, c] : m.terms()) t_.emplace(e, UniPoly::constant(p_, c));
    }

    uint32_t modulus() const { return p_; }
    int nvars() const { return n_; }
    bool is_zero() const { return t_.empty(); }
    const std::map<Exps, UniPoly>& terms() const { return t_; }

    void add_term(Exps e, const UniPoly& u) {
        if (static_cast<int>(e.size()) != n_) throw std::invalid_argument("QOnePoly: arity mismatch");
        if (u.is_zero()) return;
        auto [it, fresh] = t_.try_emplace(std::move(e), u);
        if (!fresh) {
            it->second = it->second + u;
            if (it->second.is_zero()) t_.erase(it);
        }
    }

    friend QOnePoly operator+(const QOnePoly& a, const QOnePoly& b) {
        a.check(b);
        QOnePoly r = a;
        for (const auto& [e, u] : b.t_) r.add_term(e, u);
        return r;
    }
    friend QOnePoly operator-(const QOnePoly& a, const QOnePoly& b) {
        a.check(b);
        QOnePoly r = a;
        for (const auto& [e, u] : b.t_) r.add_term(e, -u);
        return r;
    }
    QOnePoly embedded(int nvars) const {
        QOnePoly r(p_, nvars);
        for (const auto& [e, u] : t_) {
            Exps e2(nvars, 0);
            for (int i = 0; i < n_; ++i) e2[i] = e[i];
            r.add_term(std::move(e2), u);
        }
        return r;
    }

    // whether all coefficients are constants (the polynomial lies in the
    // constant-coefficient subring)
    bool is_pure() const {
        for (const auto& [e, u] : t_)
            if (!u.is_constant()) return false;
        return true;
    }
    MultiLaurent pure_part_or_throw() const {
        MultiLaurent r(p_, n_);
        for (const auto& [e, u] : t_) {
            if (!u.is_constant()) throw std::logic_error("QOnePoly: coefficients are not constants");
            r.add_term(e, u.constant_term());
        }
        return r;
    }

    friend bool operator==(const QOnePoly& a, const QOnePoly& b) = default;

  private:
    void check(const QOnePoly& o) const {
        if (p_ != o.p_ || n_ != o.n_) throw std::invalid_argument("QOnePoly: modulus/arity mismatch");
    }
    uint32_t p_ = 2;
    int n_ = 0;
    std::map<Exps, UniPoly> t_;
};

} // namespace fpmix

#endif

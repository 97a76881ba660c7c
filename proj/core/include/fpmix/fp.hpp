#ifndef FPMIX_FP_HPP
#define FPMIX_FP_HPP

#include <cstdint>
#include <stdexcept>

namespace fpmix {

// Modular arithmetic helpers for a prime modulus p. Values are kept in [0, p).
inline uint32_t fp_add(uint32_t a, uint32_t b, uint32_t p) {
    uint32_t s = a + b;
    return s >= p ? s - p : s;
}
inline uint32_t fp_sub(uint32_t a, uint32_t b, uint32_t p) {
    return a >= b ? a - b : a + p - b;
}
inline uint32_t fp_neg(uint32_t a, uint32_t p) { return a == 0 ? 0 : p - a; }
inline uint32_t fp_mul(uint32_t a, uint32_t b, uint32_t p) {
    return static_cast<uint32_t>((static_cast<uint64_t>(a) * b) % p);
}
inline uint32_t fp_pow(uint32_t a, uint64_t e, uint32_t p) {
    uint64_t r = 1 % p, x = a;
    while (e) {
        if (e & 1) r = r * x % p;
        x = x * x % p;
        e >>= 1;
    }
    return static_cast<uint32_t>(r);
}
inline uint32_t fp_inv(uint32_t a, uint32_t p) {
    if (a == 0) throw std::domain_error("fp_inv: zero has no inverse");
    return fp_pow(a, p - 2, p);
}

inline bool is_prime_u32(uint32_t n) {
    if (n < 2) return false;
    for (uint32_t d : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u}) {
        if (n % d == 0) return n == d;
        if (static_cast<uint64_t>(d) * d > n) return true;
    }
    for (uint64_t d = 37; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

// A residue together with its prime modulus.
struct FpScalar {
    uint32_t value = 0;
    uint32_t p = 2;

    FpScalar() = default;
    FpScalar(int64_t v, uint32_t modulus) : p(modulus) {
        if (!is_prime_u32(modulus)) throw std::invalid_argument("FpScalar: modulus must be prime");
        int64_t r = v % static_cast<int64_t>(modulus);
        if (r < 0) r += modulus;
        value = static_cast<uint32_t>(r);
    }

    friend FpScalar operator+(FpScalar a, FpScalar b) { a.check(b); return raw(fp_add(a.value, b.value, a.p), a.p); }
    friend FpScalar operator-(FpScalar a, FpScalar b) { a.check(b); return raw(fp_sub(a.value, b.value, a.p), a.p); }
    friend FpScalar operator*(FpScalar a, FpScalar b) { a.check(b); return raw(fp_mul(a.value, b.value, a.p), a.p); }
    FpScalar inv() const { return raw(fp_inv(value, p), p); }
    friend bool operator==(const FpScalar& a, const FpScalar& b) = default;

    static FpScalar raw(uint32_t v, uint32_t p) {
        FpScalar s;
        s.value = v;
        s.p = p;
        return s;
    }
    void check(const FpScalar& o) const {
        if (p != o.p) throw std::invalid_argument("FpScalar: modulus mismatch");
    }
};

} // namespace fpmix

#endif

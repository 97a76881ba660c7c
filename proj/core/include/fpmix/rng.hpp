#ifndef FPMIX_RNG_HPP
#define FPMIX_RNG_HPP

#include <cmath>
#include <cstdint>

namespace fpmix {

// Splittable counter-based generator. Every consumer owns an independent
// stream derived from (seed, stream); drawing is a pure function of the
// counter, so runs are reproducible regardless of evaluation order.
class SplitRng {
  public:
    SplitRng() = default;
    SplitRng(uint64_t seed, uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream * 0x9e3779b97f4a7c15ull + 0x6a09e667f3bcc909ull))) {}

    SplitRng split(uint64_t substream) const { return SplitRng(key_, substream + 1); }

    uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ull); }

    // uniform in [0, n)
    uint64_t next_below(uint64_t n) {
        // rejection-free 128-bit multiply scaling; bias is < 2^-64, irrelevant here
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        return static_cast<uint64_t>(m >> 64);
    }

    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_gaussian() {
        double u1 = 0.0;
        while (u1 == 0.0) u1 = next_double();
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925 * u2);
    }

  private:
    static uint64_t mix(uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    uint64_t key_ = 0;
    uint64_t counter_ = 0;
};

} // namespace fpmix

#endif

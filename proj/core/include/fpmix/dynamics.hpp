#ifndef FPMIX_DYNAMICS_HPP
#define FPMIX_DYNAMICS_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "fpmix/mixing.hpp"
#include "fpmix/multilaurent.hpp"
#include "fpmix/prime_family.hpp"
#include "fpmix/rng.hpp"
#include "fpmix/unipoly.hpp"

namespace fpmix {

// finite combination of characters indexed by univariate Laurent polynomials
struct TrigPoly {
    uint32_t p = 2;
    std::vector<std::pair<std::complex<double>, LaurentUniPoly>> terms;

    static TrigPoly character(uint32_t p, const LaurentUniPoly& q) { return {p, {{1.0, q}}}; }
    bool is_real_valued(double tol = 1e-12) const;
};

// nonnegative weights with finite support on the lattice
struct SummationWeights {
    std::map<LatticePoint, double> w;
    double sum() const;
    double sum_sq() const;
};

// rectangular lattice window, axes as [lo, hi] inclusive
struct Window {
    std::vector<std::pair<int64_t, int64_t>> axes;

    int dim() const { return static_cast<int>(axes.size()); }
    size_t size() const {
        size_t s = 1;
        for (auto [lo, hi] : axes) s *= static_cast<size_t>(hi - lo + 1);
        return s;
    }
    bool contains(const LatticePoint& pt) const {
        for (size_t i = 0; i < axes.size(); ++i)
            if (pt[i] < axes[i].first || pt[i] > axes[i].second) return false;
        return true;
    }
    size_t index(const LatticePoint& pt) const {
        size_t idx = 0;
        for (size_t i = 0; i < axes.size(); ++i)
            idx = idx * static_cast<size_t>(axes[i].second - axes[i].first + 1) +
                  static_cast<size_t>(pt[i] - axes[i].first);
        return idx;
    }
};

// configuration sampled on a window, with its provenance
struct WindowSample {
    Window window;
    std::vector<uint8_t> zeta; // row-major per Window::index
    uint64_t seed = 0;
    uint64_t draw = 0;

    uint8_t at(const LatticePoint& pt) const {
        if (!window.contains(pt)) throw std::out_of_range("WindowSample: coordinate outside window");
        return zeta[window.index(pt)];
    }
};

// shift-invariant subgroup of configurations cut out by linear relations
struct GroupSpec {
    uint32_t p = 2;
    int dim = 1;
    std::vector<MultiLaurent> generators; // empty: the full product group

    // relations x_{i+1} = R_i(x_1) for the non-x members of the family
    static GroupSpec from_family(const PrimeFamily& family);
};

// dual action on a single character: Q -> prod R_i^(ell_i) * Q. Negative
// exponents are allowed only in directions whose polynomial is x.
LaurentUniPoly act_on_character(const LatticePoint& ell, const LaurentUniPoly& q,
                                const PrimeFamily& family);

// Uniform samples of the window solution set of all in-window generator
// relations: row-reduce the constraint system once, then draw free cells.
// A triangular sweep is used for the two-dimensional x2 = R(x1) relation,
// dense elimination otherwise.
std::vector<WindowSample> sample_haar_window(const GroupSpec& spec, const Window& window,
                                             size_t count, uint64_t seed,
                                             uint64_t budget = 1ull << 24);

// whether every in-window relation holds for the sample
bool satisfies_relations(const GroupSpec& spec, const WindowSample& s);

// evaluation of T^ell f at a configuration; characters are laid out along
// the first window axis and shifted by ell. Reads outside the window are a
// hard error.
std::complex<double> evaluate(const TrigPoly& f, const LatticePoint& ell, const WindowSample& s);

// exact correlation <T^ell f, f> by polynomial comparison
std::complex<double> correlation(const TrigPoly& f, const LatticePoint& ell,
                                 const PrimeFamily& family);
// the finitely many ell with nonzero correlation, via prime-order matching
// (requires distinct prime family members)
std::map<LatticePoint, std::complex<double>> correlation_support(const TrigPoly& f,
                                                                 const PrimeFamily& family);

double spectral_density(const TrigPoly& f, const PrimeFamily& family,
                        const std::vector<double>& theta);
double sigma2(const TrigPoly& f, const PrimeFamily& family);

// normalized Fejer-type kernel of a weight sequence, and its lattice Fourier
// coefficients (autocorrelation ratios)
double kernel_wtilde(const SummationWeights& weights, const std::vector<double>& theta);
double kernel_coefficient(const SummationWeights& weights, const LatticePoint& q);

struct RegularityReport {
    std::vector<LatticePoint> points;
    std::vector<std::vector<double>> coefficients; // per weight sequence, per point
    bool converging = false;                       // last sequence within tol of 1
};
RegularityReport zeta_regularity_check(const std::vector<SummationWeights>& seq, int radius,
                                       double tol = 0.1);

// |D_n|^(-1/2) sum over the box [0,n)^d of T^ell f, per Haar sample
std::vector<double> folner_sums(const TrigPoly& f, const GroupSpec& spec, const PrimeFamily& family,
                                int64_t n, size_t samples, uint64_t seed);

struct StepLaw {
    std::vector<std::array<int64_t, 2>> steps; // uniform over this support
    static StepLaw lazy_nearest_neighbor();
    static StepLaw box(int radius); // uniform on {-radius..radius}^2
};

SummationWeights random_walk_weights(const StepLaw& law, int64_t n, uint64_t seed);

// quenched sums along one fixed walk, normalized by (sum w^2 * sigma2)^(1/2)
std::vector<double> rw_sums(const TrigPoly& f, const GroupSpec& spec, const PrimeFamily& family,
                            int64_t n, size_t samples, uint64_t walk_seed, uint64_t group_seed);
std::vector<double> rw_sums_with_weights(const TrigPoly& f, const GroupSpec& spec,
                                         const PrimeFamily& family, const SummationWeights& w,
                                         size_t samples, uint64_t group_seed);

struct KsResult {
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
};
// two-sided Kolmogorov-Smirnov statistic against N(0, sigma2); with
// sigma2 = 0 the reference is the point mass at 0
KsResult ks_test(std::vector<double> samples, double sigma2, double threshold);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);

} // namespace fpmix

#endif

#ifndef FPMIX_GF_LINSOLVE_HPP
#define FPMIX_GF_LINSOLVE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "fpmix/fp.hpp"
#include "fpmix/rng.hpp"

namespace fpmix {

// Dense linear algebra mod a small prime. Row-reduction with partial pivot
// by column order; solutions set free variables to zero, samplers draw them
// uniformly.
class GfMatrix {
  public:
    GfMatrix(uint32_t p, size_t rows, size_t cols)
        : p_(p), rows_(rows), cols_(cols), a_(rows, std::vector<uint32_t>(cols + 1, 0)) {}

    void set(size_t r, size_t c, uint32_t v) { a_[r][c] = v % p_; }
    void add_at(size_t r, size_t c, uint32_t v) { a_[r][c] = fp_add(a_[r][c], v % p_, p_); }
    void set_rhs(size_t r, uint32_t v) { a_[r][cols_] = v % p_; }

    struct Reduced {
        std::vector<int> pivot_of_col; // -1 when free
        bool consistent = true;
    };

    Reduced reduce() {
        Reduced out;
        out.pivot_of_col.assign(cols_, -1);
        size_t row = 0;
        for (size_t col = 0; col < cols_ && row < rows_; ++col) {
            size_t sel = row;
            while (sel < rows_ && a_[sel][col] == 0) ++sel;
            if (sel == rows_) continue;
            std::swap(a_[row], a_[sel]);
            uint32_t inv = fp_inv(a_[row][col], p_);
            for (size_t j = col; j <= cols_; ++j) a_[row][j] = fp_mul(a_[row][j], inv, p_);
            for (size_t r = 0; r < rows_; ++r) {
                if (r == row || a_[r][col] == 0) continue;
                uint32_t f = a_[r][col];
                for (size_t j = col; j <= cols_; ++j)
                    a_[r][j] = fp_sub(a_[r][j], fp_mul(f, a_[row][j], p_), p_);
            }
            out.pivot_of_col[col] = static_cast<int>(row);
            ++row;
        }
        for (size_t r = row; r < rows_; ++r)
            if (a_[r][cols_] != 0) out.consistent = false;
        return out;
    }

    // solve with free variables = 0; call after reduce()
    std::vector<uint32_t> particular_solution(const Reduced& red) const {
        std::vector<uint32_t> x(cols_, 0);
        for (size_t c = 0; c < cols_; ++c)
            if (red.pivot_of_col[c] >= 0) x[c] = a_[static_cast<size_t>(red.pivot_of_col[c])][cols_];
        return x;
    }

    // uniform solution of the system; free variables drawn from rng
    std::vector<uint32_t> sample_solution(const Reduced& red, SplitRng& rng) const {
        std::vector<uint32_t> x(cols_, 0);
        for (size_t c = 0; c < cols_; ++c)
            if (red.pivot_of_col[c] < 0) x[c] = static_cast<uint32_t>(rng.next_below(p_));
        for (size_t c = 0; c < cols_; ++c) {
            int pr = red.pivot_of_col[c];
            if (pr < 0) continue;
            // pivot row: x_c + sum over free columns = rhs
            uint32_t v = a_[static_cast<size_t>(pr)][cols_];
            for (size_t j = c + 1; j < cols_; ++j) {
                if (a_[static_cast<size_t>(pr)][j] && red.pivot_of_col[j] < 0)
                    v = fp_sub(v, fp_mul(a_[static_cast<size_t>(pr)][j], x[j], p_), p_);
            }
            x[c] = v;
        }
        return x;
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

  private:
    uint32_t p_;
    size_t rows_, cols_;
    std::vector<std::vector<uint32_t>> a_;
};

} // namespace fpmix

#endif

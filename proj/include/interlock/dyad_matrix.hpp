#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "interlock/common.hpp"

namespace interlock {

// Symmetric N x N matrix over an indexed node set. Every dyadic statistic
// in the toolkit reads only the strict upper triangle; the diagonal holds a
// declared convention value (1 for proximity/similarity, 0 for distances)
// so matrices stay printable and comparable.
class DyadMatrix {
public:
    DyadMatrix() = default;

    DyadMatrix(std::vector<std::string> ids, double diagonal)
        : ids_(std::move(ids)),
          n_(ids_.size()),
          diagonal_(diagonal),
          values_(n_ * n_, 0.0) {
        for (std::size_t i = 0; i < n_; ++i) values_[i * n_ + i] = diagonal;
    }

    std::size_t size() const { return n_; }
    const std::vector<std::string>& ids() const { return ids_; }
    double diagonal() const { return diagonal_; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

    void set(std::size_t i, std::size_t j, double v) {
        values_[i * n_ + j] = v;
        values_[j * n_ + i] = v;
    }

    const double* data() const { return values_.data(); }

    static std::size_t dyad_count(std::size_t n) { return n * (n - 1) / 2; }
    std::size_t dyad_count() const { return dyad_count(n_); }

    // Strict upper triangle in row-major pair order: (0,1), (0,2), ..., (n-2,n-1).
    std::vector<double> upper_values() const {
        std::vector<double> out;
        out.reserve(dyad_count());
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j) out.push_back(values_[i * n_ + j]);
        return out;
    }

    // Submatrix over the given node positions, preserving their order.
    DyadMatrix restricted(const std::vector<std::uint32_t>& keep) const {
        std::vector<std::string> ids;
        ids.reserve(keep.size());
        for (auto k : keep) ids.push_back(ids_[k]);
        DyadMatrix out(std::move(ids), diagonal_);
        for (std::size_t a = 0; a < keep.size(); ++a)
            for (std::size_t b = a + 1; b < keep.size(); ++b)
                out.set(a, b, (*this)(keep[a], keep[b]));
        return out;
    }

    static constexpr double infinite_distance() {
        return std::numeric_limits<double>::infinity();
    }

private:
    std::vector<std::string> ids_;
    std::size_t n_ = 0;
    double diagonal_ = 0.0;
    std::vector<double> values_;
};

// Pair (i, j) with i < j at flat position k in canonical order.
struct DyadIndex {
    std::uint32_t i, j;
};

inline std::vector<DyadIndex> dyad_index_map(std::size_t n) {
    std::vector<DyadIndex> out;
    out.reserve(DyadMatrix::dyad_count(n));
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) out.push_back({i, j});
    return out;
}

// Dense CSV with an ID header row and leading ID column; infinities print
// as "inf".
void write_matrix_csv(std::ostream& out, const DyadMatrix& matrix);

}  // namespace interlock

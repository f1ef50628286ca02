#include "interlock/kernels.hpp"

#include <algorithm>

namespace interlock::kernels {
namespace {

double sum_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

// Blocked so the streams stay cache-resident across the p^2/2 pair passes.
constexpr std::size_t kGramBlock = 1024;

void gram_upper_scalar(const double* const* v, int p, std::size_t n, double* out) {
    std::fill(out, out + std::size_t(p) * p, 0.0);
    for (std::size_t start = 0; start < n; start += kGramBlock) {
        const std::size_t len = std::min(kGramBlock, n - start);
        for (int a = 0; a < p; ++a) {
            const double* va = v[a] + start;
            for (int b = a; b < p; ++b) {
                const double* vb = v[b] + start;
                double s = 0.0;
                for (std::size_t i = 0; i < len; ++i) s += va[i] * vb[i];
                out[std::size_t(a) * p + b] += s;
            }
        }
    }
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b) out[std::size_t(b) * p + a] = out[std::size_t(a) * p + b];
}

std::size_t gather_f64_scalar(const double* mat, std::size_t n_nodes,
                              const std::uint32_t* idx, std::size_t n_idx, double* out) {
    std::size_t k = 0;
    for (std::size_t a = 0; a + 1 < n_idx; ++a) {
        const std::uint32_t sa = idx[a];
        const double* row = mat + std::size_t(sa) * n_nodes;
        for (std::size_t b = a + 1; b < n_idx; ++b) {
            const std::uint32_t sb = idx[b];
            if (sb == sa) continue;
            out[k++] = row[sb];
        }
    }
    return k;
}

std::size_t gather_u32_scalar(const std::uint32_t* mat, std::size_t n_nodes,
                              const std::uint32_t* idx, std::size_t n_idx, std::uint32_t* out) {
    std::size_t k = 0;
    for (std::size_t a = 0; a + 1 < n_idx; ++a) {
        const std::uint32_t sa = idx[a];
        const std::uint32_t* row = mat + std::size_t(sa) * n_nodes;
        for (std::size_t b = a + 1; b < n_idx; ++b) {
            const std::uint32_t sb = idx[b];
            if (sb == sa) continue;
            out[k++] = row[sb];
        }
    }
    return k;
}

}  // namespace

namespace detail {
const Ops scalar_ops = {
    sum_scalar, dot_scalar, axpy_scalar, gram_upper_scalar,
    gather_f64_scalar, gather_u32_scalar,
};
}  // namespace detail

}  // namespace interlock::kernels

#pragma once

#include <cstddef>
#include <cstdint>

namespace interlock::kernels {

// Numeric inner loops exist twice: a scalar reference implementation and a
// SIMD variant, selected once at startup from CPU capabilities. The two are
// equivalence-tested; SIMD results may differ from scalar only by floating
// point reassociation. Environment override: INTERLOCK_KERNELS=scalar|avx2.
enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_supported(Backend b);
void set_backend(Backend b);  // throws interlock::Error if unsupported here
const char* backend_name(Backend b);

double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);

// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);

// Upper-triangular Gram matrix of p parallel streams of length n:
// out[a*p + b] = dot(v[a], v[b]) for a <= b, mirrored to the lower half.
// p must be <= 16.
void gram_upper(const double* const* v, int p, std::size_t n, double* out);

// Dyad extraction for a node resample. `idx` holds n_idx node indices drawn
// with replacement from a matrix of dimension n_nodes. For every pair
// (a, b) with a < b, in row-major pair order, appends mat[idx[a]][idx[b]]
// to `out` unless idx[a] == idx[b] (an artificial self-pair, skipped).
// Returns the number of values written. The kept-pair pattern depends only
// on `idx`, so parallel vectors extracted with the same `idx` stay aligned.
std::size_t gather_resampled_dyads(const double* mat, std::size_t n_nodes,
                                   const std::uint32_t* idx, std::size_t n_idx,
                                   double* out);
std::size_t gather_resampled_dyads_u32(const std::uint32_t* mat, std::size_t n_nodes,
                                       const std::uint32_t* idx, std::size_t n_idx,
                                       std::uint32_t* out);

namespace detail {

struct Ops {
    double (*sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*gram_upper)(const double* const*, int, std::size_t, double*);
    std::size_t (*gather_f64)(const double*, std::size_t, const std::uint32_t*, std::size_t, double*);
    std::size_t (*gather_u32)(const std::uint32_t*, std::size_t, const std::uint32_t*, std::size_t, std::uint32_t*);
};

extern const Ops scalar_ops;
#if defined(INTERLOCK_HAVE_AVX2)
extern const Ops avx2_ops;
#endif

}  // namespace detail

}  // namespace interlock::kernels

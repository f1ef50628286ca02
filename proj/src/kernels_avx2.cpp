#include "interlock/kernels.hpp"

#if defined(INTERLOCK_HAVE_AVX2)

#include <immintrin.h>

#include <algorithm>

namespace interlock::kernels {
namespace {

inline double hsum4(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
        acc2 = _mm256_add_pd(acc2, _mm256_loadu_pd(x + i + 8));
        acc3 = _mm256_add_pd(acc3, _mm256_loadu_pd(x + i + 12));
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    double s = hsum4(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i) s += x[i];
    return s;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8), _mm256_loadu_pd(y + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12), _mm256_loadu_pd(y + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double s = hsum4(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

constexpr std::size_t kGramBlock = 1024;

void gram_upper_avx2(const double* const* v, int p, std::size_t n, double* out) {
    std::fill(out, out + std::size_t(p) * p, 0.0);
    for (std::size_t start = 0; start < n; start += kGramBlock) {
        const std::size_t len = std::min(kGramBlock, n - start);
        for (int a = 0; a < p; ++a) {
            const double* va = v[a] + start;
            for (int b = a; b < p; ++b) {
                out[std::size_t(a) * p + b] += dot_avx2(va, v[b] + start, len);
            }
        }
    }
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b) out[std::size_t(b) * p + a] = out[std::size_t(a) * p + b];
}

std::size_t gather_f64_avx2(const double* mat, std::size_t n_nodes,
                            const std::uint32_t* idx, std::size_t n_idx, double* out) {
    std::size_t k = 0;
    alignas(32) double tmp[4];
    for (std::size_t a = 0; a + 1 < n_idx; ++a) {
        const std::uint32_t sa = idx[a];
        const double* row = mat + std::size_t(sa) * n_nodes;
        const __m128i vsa = _mm_set1_epi32(int(sa));
        std::size_t b = a + 1;
        for (; b + 4 <= n_idx; b += 4) {
            __m128i vidx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + b));
            __m256d g = _mm256_i32gather_pd(row, vidx, 8);
            int self = _mm_movemask_ps(_mm_castsi128_ps(_mm_cmpeq_epi32(vidx, vsa)));
            if (self == 0) {
                _mm256_storeu_pd(out + k, g);
                k += 4;
            } else {
                _mm256_store_pd(tmp, g);
                for (int j = 0; j < 4; ++j)
                    if (!((self >> j) & 1)) out[k++] = tmp[j];
            }
        }
        for (; b < n_idx; ++b) {
            const std::uint32_t sb = idx[b];
            if (sb != sa) out[k++] = row[sb];
        }
    }
    return k;
}

std::size_t gather_u32_avx2(const std::uint32_t* mat, std::size_t n_nodes,
                            const std::uint32_t* idx, std::size_t n_idx, std::uint32_t* out) {
    std::size_t k = 0;
    alignas(16) std::uint32_t tmp[4];
    for (std::size_t a = 0; a + 1 < n_idx; ++a) {
        const std::uint32_t sa = idx[a];
        const std::uint32_t* row = mat + std::size_t(sa) * n_nodes;
        const __m128i vsa = _mm_set1_epi32(int(sa));
        std::size_t b = a + 1;
        for (; b + 4 <= n_idx; b += 4) {
            __m128i vidx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + b));
            __m128i g = _mm_i32gather_epi32(reinterpret_cast<const int*>(row), vidx, 4);
            int self = _mm_movemask_ps(_mm_castsi128_ps(_mm_cmpeq_epi32(vidx, vsa)));
            if (self == 0) {
                _mm_storeu_si128(reinterpret_cast<__m128i*>(out + k), g);
                k += 4;
            } else {
                _mm_store_si128(reinterpret_cast<__m128i*>(tmp), g);
                for (int j = 0; j < 4; ++j)
                    if (!((self >> j) & 1)) out[k++] = tmp[j];
            }
        }
        for (; b < n_idx; ++b) {
            const std::uint32_t sb = idx[b];
            if (sb != sa) out[k++] = row[sb];
        }
    }
    return k;
}

}  // namespace

namespace detail {
const Ops avx2_ops = {
    sum_avx2, dot_avx2, axpy_avx2, gram_upper_avx2,
    gather_f64_avx2, gather_u32_avx2,
};
}  // namespace detail

}  // namespace interlock::kernels

#endif  // INTERLOCK_HAVE_AVX2

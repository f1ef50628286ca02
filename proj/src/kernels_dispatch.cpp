#include "interlock/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <cstring>

#include "interlock/common.hpp"

namespace interlock::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(INTERLOCK_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend detect_backend() {
    if (const char* env = std::getenv("INTERLOCK_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Backend::avx2;
        return Backend::scalar;
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

const detail::Ops* ops_for(Backend b) {
#if defined(INTERLOCK_HAVE_AVX2)
    if (b == Backend::avx2) return &detail::avx2_ops;
#endif
    (void)b;
    return &detail::scalar_ops;
}

struct State {
    std::atomic<Backend> backend;
    std::atomic<const detail::Ops*> ops;
    State() {
        Backend b = detect_backend();
        backend.store(b, std::memory_order_relaxed);
        ops.store(ops_for(b), std::memory_order_relaxed);
    }
};

State& state() {
    static State s;
    return s;
}

inline const detail::Ops& ops() { return *state().ops.load(std::memory_order_relaxed); }

}  // namespace

Backend active_backend() { return state().backend.load(std::memory_order_relaxed); }

bool backend_supported(Backend b) {
    return b == Backend::scalar || (b == Backend::avx2 && cpu_has_avx2());
}

void set_backend(Backend b) {
    if (!backend_supported(b))
        throw Error(std::string("kernel backend not supported on this CPU: ") + backend_name(b));
    state().backend.store(b, std::memory_order_relaxed);
    state().ops.store(ops_for(b), std::memory_order_relaxed);
}

const char* backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

double sum(const double* x, std::size_t n) { return ops().sum(x, n); }

double dot(const double* x, const double* y, std::size_t n) { return ops().dot(x, y, n); }

void axpy(double a, const double* x, double* y, std::size_t n) { ops().axpy(a, x, y, n); }

void gram_upper(const double* const* v, int p, std::size_t n, double* out) {
    assert(p >= 1 && p <= 16);
    ops().gram_upper(v, p, n, out);
}

std::size_t gather_resampled_dyads(const double* mat, std::size_t n_nodes,
                                   const std::uint32_t* idx, std::size_t n_idx, double* out) {
    return ops().gather_f64(mat, n_nodes, idx, n_idx, out);
}

std::size_t gather_resampled_dyads_u32(const std::uint32_t* mat, std::size_t n_nodes,
                                       const std::uint32_t* idx, std::size_t n_idx,
                                       std::uint32_t* out) {
    return ops().gather_u32(mat, n_nodes, idx, n_idx, out);
}

}  // namespace interlock::kernels

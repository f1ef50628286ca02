#include "interlock/linalg.hpp"

#include <cmath>

#include "interlock/kernels.hpp"
#include "interlock/rng.hpp"

namespace interlock::linalg {

bool cholesky_small(double* a, std::size_t p, double rel_tol, std::size_t* failed_col) {
    constexpr std::size_t kMax = 24;
    double diag[kMax];
    for (std::size_t j = 0; j < p; ++j) diag[j] = a[j * p + j];
    for (std::size_t j = 0; j < p; ++j) {
        double d = a[j * p + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * p + k] * a[j * p + k];
        if (!(d > rel_tol * diag[j]) || diag[j] <= 0.0) {
            if (failed_col) *failed_col = j;
            return false;
        }
        double root = std::sqrt(d);
        a[j * p + j] = root;
        for (std::size_t i = j + 1; i < p; ++i) {
            double s = a[i * p + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * p + k] * a[j * p + k];
            a[i * p + j] = s / root;
        }
    }
    return true;
}

void cholesky_solve(const double* l, std::size_t p, const double* b, double* x) {
    for (std::size_t i = 0; i < p; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l[i * p + k] * x[k];
        x[i] = s / l[i * p + i];
    }
    for (std::size_t ii = p; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t k = ii + 1; k < p; ++k) s -= l[k * p + ii] * x[k];
        x[ii] = s / l[ii * p + ii];
    }
}

bool cholesky_factor(std::vector<double>& a, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j] - kernels::dot(&a[j * n], &a[j * n], j);
        if (!(d > 0.0)) return false;
        double root = std::sqrt(d);
        a[j * n + j] = root;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j] - kernels::dot(&a[i * n], &a[j * n], j);
            a[i * n + j] = s / root;
        }
    }
    return true;
}

void lower_multiply(const std::vector<double>& a, std::size_t n, const double* w, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = kernels::dot(&a[i * n], w, i + 1);
}

double smallest_eigenvalue_estimate(const double* a, std::size_t n, int iterations) {
    if (n == 0) return 0.0;
    if (n == 1) return a[0];

    double shift = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::abs(a[i * n + j]);
        shift = std::max(shift, row);
    }

    // Power iteration on B = shift*I - A; its top eigenvalue is
    // shift - lambda_min(A).
    Rng rng(0x5eed0eedULL + n);
    std::vector<double> v(n), w(n);
    for (double& x : v) x = rng.normal();
    for (int it = 0; it < iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i)
            w[i] = shift * v[i] - kernels::dot(&a[i * n], v.data(), n);
        double norm = std::sqrt(kernels::dot(w.data(), w.data(), n));
        if (norm == 0.0) return shift;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
    }
    double rayleigh = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        rayleigh += v[i] * (shift * v[i] - kernels::dot(&a[i * n], v.data(), n));
    return shift - rayleigh;
}

}  // namespace interlock::linalg

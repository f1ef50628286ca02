#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace interlock::linalg {

// In-place Cholesky of a small symmetric positive definite matrix, row
// major, lower triangle receives L. Fails when a pivot drops below
// rel_tol times its original diagonal (a linearly dependent column);
// failed_col then names the offending column.
bool cholesky_small(double* a, std::size_t p, double rel_tol, std::size_t* failed_col);

// Solves L L^T x = b given the factor from cholesky_small.
void cholesky_solve(const double* l, std::size_t p, const double* b, double* x);

// Cholesky for large matrices (synthetic covariance roots), strict
// positivity, inner products through the kernel dispatch.
bool cholesky_factor(std::vector<double>& a, std::size_t n);

// out = L w for the lower-triangular factor stored in `a`.
void lower_multiply(const std::vector<double>& a, std::size_t n, const double* w, double* out);

// Smallest-eigenvalue estimate of a symmetric matrix by power iteration on
// the Gershgorin-shifted complement. Deterministic.
double smallest_eigenvalue_estimate(const double* a, std::size_t n, int iterations = 200);

}  // namespace interlock::linalg

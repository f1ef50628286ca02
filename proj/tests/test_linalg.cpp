#include <cmath>
#include <vector>

#include "doctest.h"
#include "interlock/linalg.hpp"
#include "interlock/rng.hpp"

using namespace interlock;

namespace {

// Random symmetric positive definite p x p matrix A = B B^T + eps I.
std::vector<double> random_spd(Rng& rng, std::size_t p, double eps = 0.1) {
    std::vector<double> b(p * p);
    for (auto& v : b) v = rng.normal();
    std::vector<double> a(p * p, 0.0);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < p; ++k) s += b[i * p + k] * b[j * p + k];
            a[i * p + j] = s + (i == j ? eps : 0.0);
        }
    return a;
}

}  // namespace

TEST_CASE("cholesky_small factors and solves") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t p = 1 + rng.below(8);
        auto a = random_spd(rng, p);
        auto original = a;
        std::size_t bad = 0;
        REQUIRE(linalg::cholesky_small(a.data(), p, 1e-12, &bad));

        std::vector<double> x_true(p), b(p, 0.0);
        for (auto& v : x_true) v = rng.normal();
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) b[i] += original[i * p + j] * x_true[j];

        std::vector<double> x(p);
        linalg::cholesky_solve(a.data(), p, b.data(), x.data());
        for (std::size_t i = 0; i < p; ++i)
            CHECK(x[i] == doctest::Approx(x_true[i]).epsilon(1e-8));
    }
}

TEST_CASE("cholesky_small rejects singular matrices naming the column") {
    // column 2 = column 0 + column 1
    std::vector<double> v0 = {1, 2, 3, 4};
    std::vector<double> v1 = {0, 1, -1, 2};
    std::vector<double> v2(4);
    for (int i = 0; i < 4; ++i) v2[i] = v0[i] + v1[i];
    std::vector<std::vector<double>> cols = {v0, v1, v2};
    std::vector<double> a(9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int k = 0; k < 4; ++k) s += cols[i][k] * cols[j][k];
            a[i * 3 + j] = s;
        }
    std::size_t bad = 99;
    CHECK_FALSE(linalg::cholesky_small(a.data(), 3, 1e-10, &bad));
    CHECK(bad == 2);
}

TEST_CASE("cholesky_factor reproduces the matrix") {
    Rng rng(21);
    std::size_t n = 40;
    auto a = random_spd(rng, n, 0.5);
    auto factor = a;
    REQUIRE(linalg::cholesky_factor(factor, n));
    // check L L^T == A on a few entries
    for (int probe = 0; probe < 50; ++probe) {
        std::size_t i = rng.below(std::uint64_t(n));
        std::size_t j = rng.below(std::uint64_t(n));
        if (i < j) std::swap(i, j);
        double s = 0;
        for (std::size_t k = 0; k <= j; ++k) s += factor[i * n + k] * factor[j * n + k];
        CHECK(s == doctest::Approx(a[i * n + j]).epsilon(1e-8));
    }
}

TEST_CASE("cholesky_factor fails on an indefinite matrix") {
    std::vector<double> a = {1.0, 2.0, 2.0, 1.0};  // eigenvalues 3 and -1
    CHECK_FALSE(linalg::cholesky_factor(a, 2));
}

TEST_CASE("lower_multiply applies the factor") {
    std::vector<double> a = {2.0, 0.0, 0.0, 1.0, 3.0, 0.0, 0.5, -1.0, 1.5};
    std::vector<double> w = {1.0, 2.0, -1.0};
    std::vector<double> out(3);
    linalg::lower_multiply(a, 3, w.data(), out.data());
    CHECK(out[0] == doctest::Approx(2.0));
    CHECK(out[1] == doctest::Approx(1.0 + 6.0));
    CHECK(out[2] == doctest::Approx(0.5 - 2.0 - 1.5));
}

TEST_CASE("smallest eigenvalue estimate brackets known spectra") {
    // diag(3, 1, 5) => min eigenvalue 1
    std::vector<double> d = {3, 0, 0, 0, 1, 0, 0, 0, 5};
    CHECK(linalg::smallest_eigenvalue_estimate(d.data(), 3) == doctest::Approx(1.0).epsilon(1e-3));

    // [[1,2],[2,1]] => eigenvalues 3, -1
    std::vector<double> a = {1, 2, 2, 1};
    CHECK(linalg::smallest_eigenvalue_estimate(a.data(), 2) ==
          doctest::Approx(-1.0).epsilon(1e-3));

    Rng rng(5);
    auto spd = random_spd(rng, 10, 0.2);
    CHECK(linalg::smallest_eigenvalue_estimate(spd.data(), 10) > 0.0);
}

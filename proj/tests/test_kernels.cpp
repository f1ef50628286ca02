#include <cmath>
#include <vector>

#include "doctest.h"
#include "interlock/common.hpp"
#include "interlock/kernels.hpp"
#include "interlock/rng.hpp"

using namespace interlock;
using kernels::detail::Ops;

TEST_CASE("scalar kernels compute exact small cases") {
    const Ops& ops = kernels::detail::scalar_ops;
    std::vector<double> x = {1, 2, 3, 4};
    std::vector<double> y = {2, -1, 0.5, 3};
    CHECK(ops.sum(x.data(), 4) == 10.0);
    CHECK(ops.dot(x.data(), y.data(), 4) == doctest::Approx(2 - 2 + 1.5 + 12));
    std::vector<double> acc = {1, 1, 1, 1};
    ops.axpy(2.0, x.data(), acc.data(), 4);
    CHECK(acc == std::vector<double>{3, 5, 7, 9});
}

TEST_CASE("gram_upper matches direct dot products") {
    Rng rng(9);
    std::size_t n = 37;
    int p = 5;
    std::vector<std::vector<double>> cols(p, std::vector<double>(n));
    std::vector<const double*> ptrs;
    for (auto& c : cols) {
        for (auto& v : c) v = rng.normal();
        ptrs.push_back(c.data());
    }
    std::vector<double> out(p * p, 0.0);
    kernels::gram_upper(ptrs.data(), p, n, out.data());
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) {
            double want = 0;
            for (std::size_t k = 0; k < n; ++k) want += cols[a][k] * cols[b][k];
            CHECK(out[a * p + b] == doctest::Approx(want).epsilon(1e-12));
        }
}

TEST_CASE("gather skips self pairs and keeps parallel vectors aligned") {
    // 4-node matrix with distinct entries
    std::size_t n = 4;
    std::vector<double> mat(n * n, 0.0);
    std::vector<std::uint32_t> umat(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            mat[i * n + j] = double(10 * (i + 1) + j + 1);
            umat[i * n + j] = std::uint32_t(10 * (i + 1) + j + 1);
        }
    std::vector<std::uint32_t> idx = {2, 0, 2, 3};
    std::vector<double> out(6);
    auto wrote = kernels::gather_resampled_dyads(mat.data(), n, idx.data(), 4, out.data());
    // pairs in row-major order: (2,0) (2,2 skipped) (2,3) (0,2) (0,3) (2,3)
    REQUIRE(wrote == 5);
    CHECK(out[0] == mat[2 * n + 0]);
    CHECK(out[1] == mat[2 * n + 3]);
    CHECK(out[2] == mat[0 * n + 2]);
    CHECK(out[3] == mat[0 * n + 3]);
    CHECK(out[4] == mat[2 * n + 3]);

    std::vector<std::uint32_t> uout(6);
    auto uwrote =
        kernels::gather_resampled_dyads_u32(umat.data(), n, idx.data(), 4, uout.data());
    REQUIRE(uwrote == wrote);
    for (std::size_t k = 0; k < wrote; ++k) CHECK(double(uout[k]) == out[k]);
}

TEST_CASE("all-identical resample writes nothing") {
    std::vector<double> mat = {0, 1, 1, 0};
    std::vector<std::uint32_t> idx = {1, 1, 1};
    std::vector<double> out(3, -1);
    CHECK(kernels::gather_resampled_dyads(mat.data(), 2, idx.data(), 3, out.data()) == 0);
}

TEST_CASE("backend selection reports a valid backend") {
    auto active = kernels::active_backend();
    CHECK(kernels::backend_supported(active));
    CHECK(kernels::backend_name(kernels::Backend::scalar) == std::string("scalar"));
    CHECK(kernels::backend_name(kernels::Backend::avx2) == std::string("avx2"));
    CHECK(kernels::backend_supported(kernels::Backend::scalar));
}

TEST_CASE("simd and scalar kernels agree") {
    if (!kernels::backend_supported(kernels::Backend::avx2)) return;
    auto saved = kernels::active_backend();

    Rng rng(31337);
    for (std::size_t n : {1ull, 2ull, 3ull, 4ull, 7ull, 8ull, 15ull, 64ull, 1000ull, 1003ull}) {
        std::vector<double> x(n), y(n);
        for (auto& v : x) v = rng.normal();
        for (auto& v : y) v = rng.normal();

        kernels::set_backend(kernels::Backend::scalar);
        double s_sum = kernels::sum(x.data(), n);
        double s_dot = kernels::dot(x.data(), y.data(), n);
        std::vector<double> s_acc(y);
        kernels::axpy(1.5, x.data(), s_acc.data(), n);

        kernels::set_backend(kernels::Backend::avx2);
        double v_sum = kernels::sum(x.data(), n);
        double v_dot = kernels::dot(x.data(), y.data(), n);
        std::vector<double> v_acc(y);
        kernels::axpy(1.5, x.data(), v_acc.data(), n);

        CHECK(std::abs(s_sum - v_sum) <= 1e-12 * (1.0 + std::abs(s_sum)));
        CHECK(std::abs(s_dot - v_dot) <= 1e-12 * (1.0 + std::abs(s_dot)));
        for (std::size_t k = 0; k < n; ++k)
            CHECK(std::abs(s_acc[k] - v_acc[k]) <= 1e-12 * (1.0 + std::abs(s_acc[k])));
    }

    // gather kernels must agree exactly (pure data movement)
    std::size_t nodes = 23;
    std::vector<double> mat(nodes * nodes);
    std::vector<std::uint32_t> umat(nodes * nodes);
    for (std::size_t k = 0; k < mat.size(); ++k) {
        mat[k] = rng.normal();
        umat[k] = std::uint32_t(rng.below(1000));
    }
    std::vector<std::uint32_t> idx(nodes);
    for (auto& v : idx) v = std::uint32_t(rng.below(nodes));
    std::size_t cap = nodes * (nodes - 1) / 2;
    std::vector<double> a(cap), b(cap);
    std::vector<std::uint32_t> ua(cap), ub(cap);

    kernels::set_backend(kernels::Backend::scalar);
    auto na = kernels::gather_resampled_dyads(mat.data(), nodes, idx.data(), nodes, a.data());
    auto nua =
        kernels::gather_resampled_dyads_u32(umat.data(), nodes, idx.data(), nodes, ua.data());
    kernels::set_backend(kernels::Backend::avx2);
    auto nb = kernels::gather_resampled_dyads(mat.data(), nodes, idx.data(), nodes, b.data());
    auto nub =
        kernels::gather_resampled_dyads_u32(umat.data(), nodes, idx.data(), nodes, ub.data());

    REQUIRE(na == nb);
    REQUIRE(nua == nub);
    for (std::size_t k = 0; k < na; ++k) CHECK(a[k] == b[k]);
    for (std::size_t k = 0; k < nua; ++k) CHECK(ua[k] == ub[k]);

    // gram agreement within reassociation tolerance
    int p = 7;
    std::size_t len = 501;
    std::vector<std::vector<double>> cols(p, std::vector<double>(len));
    std::vector<const double*> ptrs;
    for (auto& c : cols) {
        for (auto& v : c) v = rng.normal();
        ptrs.push_back(c.data());
    }
    std::vector<double> gs(p * p), gv(p * p);
    kernels::set_backend(kernels::Backend::scalar);
    kernels::gram_upper(ptrs.data(), p, len, gs.data());
    kernels::set_backend(kernels::Backend::avx2);
    kernels::gram_upper(ptrs.data(), p, len, gv.data());
    for (int k = 0; k < p * p; ++k)
        CHECK(std::abs(gs[k] - gv[k]) <= 1e-10 * (1.0 + std::abs(gs[k])));

    kernels::set_backend(saved);
}

TEST_CASE("unsupported backend requests throw") {
    if (kernels::backend_supported(kernels::Backend::avx2)) return;
    CHECK_THROWS_AS(kernels::set_backend(kernels::Backend::avx2), Error);
}

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "interlock/dyadstats.hpp"
#include "interlock/kernels.hpp"
#include "interlock/linalg.hpp"
#include "interlock/parallel.hpp"
#include "interlock/rng.hpp"

namespace interlock {
namespace dyadstats {

namespace {

constexpr double kPivotTol = 1e-10;

long double binomial_sum(int lo, int hi, int n, double p) {
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    const double lg_n1 = std::lgamma(double(n) + 1.0);
    long double total = 0.0L;
    for (int k = lo; k <= hi; ++k) {
        double log_term = lg_n1 - std::lgamma(double(k) + 1.0) -
                          std::lgamma(double(n - k) + 1.0) + double(k) * log_p +
                          double(n - k) * log_q;
        total += std::exp((long double)log_term);
    }
    return total;
}

void check_binomial_args(int successes, int n, double p) {
    if (n < 0 || successes < 0 || successes > n)
        throw Error("binomial test requires 0 <= successes <= n");
    if (!(p >= 0.0 && p <= 1.0)) throw Error("binomial test requires p in [0, 1]");
}

}  // namespace

double binomial_tail(int successes, int n, double p) {
    check_binomial_args(successes, n, p);
    if (successes == 0) return 1.0;
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    return double(std::min(1.0L, binomial_sum(successes, n, n, p)));
}

double binomial_two_sided(int successes, int n, double p) {
    check_binomial_args(successes, n, p);
    long double upper = 1.0L, lower = 1.0L;
    if (p == 0.0) {
        upper = successes == 0 ? 1.0L : 0.0L;
    } else if (p == 1.0) {
        lower = successes == n ? 1.0L : 0.0L;
    } else {
        upper = binomial_sum(successes, n, n, p);
        lower = binomial_sum(0, successes, n, p);
    }
    return double(std::min(1.0L, 2.0L * std::min(upper, lower)));
}

namespace {

std::vector<std::vector<double>> rank_columns(const std::vector<const std::vector<double>*>& cols,
                                              std::size_t n) {
    std::vector<std::vector<double>> ranked;
    ranked.reserve(cols.size());
    const double inv = 1.0 / double(n);
    for (const auto* col : cols) {
        auto r = average_ranks(col->data(), n);
        for (double& v : r) v *= inv;
        ranked.push_back(std::move(r));
    }
    return ranked;
}

double rank_corr_point(const std::vector<std::vector<double>>& ranked, std::size_t n_controls,
                       std::size_t n) {
    std::vector<const double*> ptrs(ranked.size());
    for (std::size_t c = 0; c < ranked.size(); ++c) ptrs[c] = ranked[c].data();
    auto rho = residual_correlation(ptrs.data(), n_controls, n, nullptr);
    if (!rho)
        throw Error("zero variance in a rank vector, the partial rank correlation is undefined");
    return *rho;
}

}  // namespace

double partial_rank_corr(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<const std::vector<double>*>& controls) {
    const std::size_t n = x.size();
    if (y.size() != n) throw Error("rank correlation inputs differ in length");
    for (const auto* c : controls)
        if (c->size() != n) throw Error("rank correlation control differs in length");
    if (n < 4) throw Error("partial rank correlation needs at least four observations");

    std::vector<const std::vector<double>*> cols;
    cols.reserve(controls.size() + 2);
    cols.push_back(&x);
    cols.push_back(&y);
    for (const auto* c : controls) cols.push_back(c);
    return rank_corr_point(rank_columns(cols, n), controls.size(), n);
}

RankCorrResult partial_rank_corr_ci(const std::vector<double>& x, const std::vector<double>& y,
                                    const std::vector<const std::vector<double>*>& controls,
                                    std::size_t replicates, std::uint64_t seed, int jobs) {
    RankCorrResult result;
    result.n = x.size();
    result.seed = seed;
    result.rho = partial_rank_corr(x, y, controls);
    if (replicates == 0) return result;
    if (replicates < 100) throw Error("bootstrap needs at least 100 replicates");

    const std::size_t n = x.size();
    std::vector<const std::vector<double>*> cols;
    cols.push_back(&x);
    cols.push_back(&y);
    for (const auto* c : controls) cols.push_back(c);
    const std::size_t ncols = cols.size();

    std::vector<double> stats(replicates);
    parallel_chunks(replicates, jobs, [&](std::size_t lo, std::size_t hi) {
        std::vector<std::vector<double>> resampled(ncols, std::vector<double>(n));
        std::vector<std::vector<double>> ranked(ncols, std::vector<double>(n));
        std::vector<const double*> ptrs(ncols);
        std::vector<std::uint32_t> idx(n);
        const double inv = 1.0 / double(n);
        for (std::size_t rep = lo; rep < hi; ++rep) {
            Rng rng(derive_seed(seed, rep));
            bool done = false;
            for (int attempt = 0; attempt <= 10 && !done; ++attempt) {
                for (std::size_t i = 0; i < n; ++i) idx[i] = std::uint32_t(rng.below(n));
                for (std::size_t c = 0; c < ncols; ++c) {
                    for (std::size_t i = 0; i < n; ++i) resampled[c][i] = (*cols[c])[idx[i]];
                    ranked[c] = average_ranks(resampled[c].data(), n);
                    for (double& v : ranked[c]) v *= inv;
                    ptrs[c] = ranked[c].data();
                }
                auto rho = residual_correlation(ptrs.data(), ncols - 2, n, nullptr);
                if (rho) {
                    stats[rep] = *rho;
                    done = true;
                }
            }
            if (!done)
                throw Error("bootstrap replicate " + std::to_string(rep) +
                            " stayed degenerate after 10 redraws");
        }
    });

    std::sort(stats.begin(), stats.end());
    result.ci = {sorted_quantile(stats, 0.025), sorted_quantile(stats, 0.975)};
    result.replicates = replicates;
    return result;
}

namespace {

// Least squares of y on [1 | z_0 .. z_{p-1}]; beta has p+1 entries led by
// the intercept. Returns false when the normal equations are not positive
// definite within tolerance.
bool ols_fit(const double* y, const double* const* z, std::size_t p, std::size_t n, double* beta,
             double* sse, double* syy) {
    constexpr std::size_t kMaxP = 17;
    const std::size_t q = p + 1;
    double a[kMaxP * kMaxP];
    double b[kMaxP];
    a[0] = double(n);
    b[0] = kernels::sum(y, n);
    for (std::size_t i = 0; i < p; ++i) {
        double s = kernels::sum(z[i], n);
        a[0 * q + (i + 1)] = s;
        a[(i + 1) * q + 0] = s;
        b[i + 1] = kernels::dot(z[i], y, n);
        for (std::size_t j = i; j < p; ++j) {
            double d = kernels::dot(z[i], z[j], n);
            a[(i + 1) * q + (j + 1)] = d;
            a[(j + 1) * q + (i + 1)] = d;
        }
    }
    std::size_t failed = 0;
    if (!linalg::cholesky_small(a, q, kPivotTol, &failed)) return false;
    linalg::cholesky_solve(a, q, b, beta);

    double yy = kernels::dot(y, y, n);
    double proj = 0.0;
    for (std::size_t i = 0; i < q; ++i) proj += beta[i] * b[i];
    *sse = std::max(0.0, yy - proj);
    *syy = yy - b[0] * b[0] / double(n);
    return true;
}

}  // namespace

RegressionResult regress(const std::vector<double>& response,
                         const std::vector<std::pair<std::string, std::vector<double>>>& predictors,
                         const RegressionOptions& options, Findings* audit) {
    const std::size_t n = response.size();
    if (n < 10) throw Error("regression needs at least 10 observations");
    for (const auto& [name, col] : predictors)
        if (col.size() != n)
            throw Error("predictor '" + name + "' does not match the response length");
    if (predictors.size() > 16) throw Error("too many predictors");

    RegressionResult result;
    result.n = n;
    result.seed = options.seed;

    // Scale once on the full sample; constant columns cannot be scaled.
    std::vector<std::vector<double>> scaled;
    for (const auto& [name, col] : predictors) {
        double mean = kernels::sum(col.data(), n) / double(n);
        double ss = 0.0, amax = 0.0;
        for (double v : col) {
            ss += (v - mean) * (v - mean);
            amax = std::max(amax, std::abs(v));
        }
        double floor = double(n) * 1e-24 * std::max(amax * amax, DBL_MIN);
        if (ss <= floor) {
            result.dropped.push_back(name);
            if (audit)
                audit->push_back(
                    {Finding::Severity::warning, name, "constant predictor, dropped"});
            continue;
        }
        double sd = std::sqrt(ss / double(n - 1));
        std::vector<double> zcol(n);
        for (std::size_t i = 0; i < n; ++i) zcol[i] = (col[i] - mean) / sd;
        scaled.push_back(std::move(zcol));
        result.predictors.push_back(name);
    }
    const std::size_t p = scaled.size();
    if (n < p + 2) throw Error("regression needs more observations than predictors");

    std::vector<const double*> zptrs(p);
    for (std::size_t i = 0; i < p; ++i) zptrs[i] = scaled[i].data();
    std::vector<double> beta(p + 1);
    double sse = 0.0, syy = 0.0;
    if (!ols_fit(response.data(), zptrs.data(), p, n, beta.data(), &sse, &syy))
        throw Error("design matrix is rank-deficient");
    result.intercept = beta[0];
    result.coefficients.assign(beta.begin() + 1, beta.end());
    result.r_squared =
        syy > 1e-12 * std::max(kernels::dot(response.data(), response.data(), n), DBL_MIN)
            ? std::clamp(1.0 - sse / syy, 0.0, 1.0)
            : 0.0;

    if (options.replicates == 0) return result;
    if (options.replicates < 100) throw Error("bootstrap needs at least 100 replicates");

    std::vector<std::vector<double>> slope_stats(p, std::vector<double>(options.replicates));
    parallel_chunks(options.replicates, options.jobs, [&](std::size_t lo, std::size_t hi) {
        std::vector<std::uint32_t> idx(n);
        std::vector<double> y_r(n);
        std::vector<std::vector<double>> z_r(p, std::vector<double>(n));
        std::vector<const double*> ptrs(p);
        for (std::size_t i = 0; i < p; ++i) ptrs[i] = z_r[i].data();
        std::vector<double> rb(p + 1);
        for (std::size_t rep = lo; rep < hi; ++rep) {
            Rng rng(derive_seed(options.seed, rep));
            bool done = false;
            for (int attempt = 0; attempt <= 10 && !done; ++attempt) {
                for (std::size_t i = 0; i < n; ++i) idx[i] = std::uint32_t(rng.below(n));
                for (std::size_t i = 0; i < n; ++i) y_r[i] = response[idx[i]];
                for (std::size_t c = 0; c < p; ++c)
                    for (std::size_t i = 0; i < n; ++i) z_r[c][i] = scaled[c][idx[i]];
                double rs = 0.0, rt = 0.0;
                if (ols_fit(y_r.data(), ptrs.data(), p, n, rb.data(), &rs, &rt)) {
                    for (std::size_t c = 0; c < p; ++c) slope_stats[c][rep] = rb[c + 1];
                    done = true;
                }
            }
            if (!done)
                throw Error("regression bootstrap replicate " + std::to_string(rep) +
                            " stayed rank-deficient after 10 redraws");
        }
    });

    result.replicates = options.replicates;
    result.cis.resize(p);
    for (std::size_t c = 0; c < p; ++c) {
        std::sort(slope_stats[c].begin(), slope_stats[c].end());
        result.cis[c] = {sorted_quantile(slope_stats[c], 0.025),
                         sorted_quantile(slope_stats[c], 0.975)};
    }
    return result;
}

}  // namespace dyadstats
}  // namespace interlock

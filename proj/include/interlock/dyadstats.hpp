#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "interlock/common.hpp"
#include "interlock/dyad_matrix.hpp"

namespace interlock {

enum class Method { pearson, spearman };

inline const char* method_name(Method m) {
    return m == Method::pearson ? "pearson" : "spearman";
}

std::optional<Method> parse_method(std::string_view name);

struct MantelResult {
    Method method = Method::pearson;
    double r = 0.0;
    std::optional<std::pair<double, double>> ci;
    std::size_t replicates = 0;
    std::size_t n_dyads = 0;
    std::size_t nodes = 0;
    std::vector<std::string> controls;  // controls actually used
    std::uint64_t seed = 0;

    // Both CI bounds share a sign (the Fig.-style significance convention).
    bool excludes_zero() const {
        return ci && ((ci->first > 0 && ci->second > 0) || (ci->first < 0 && ci->second < 0));
    }
};

struct RankCorrResult {
    double rho = 0.0;
    std::optional<std::pair<double, double>> ci;
    std::size_t replicates = 0;
    std::size_t n = 0;
    std::uint64_t seed = 0;

    bool excludes_zero() const {
        return ci && ((ci->first > 0 && ci->second > 0) || (ci->first < 0 && ci->second < 0));
    }
};

struct RegressionResult {
    std::vector<std::string> predictors;             // retained, z-scored
    std::vector<double> coefficients;                // aligned with predictors
    std::vector<std::pair<double, double>> cis;      // aligned; empty without bootstrap
    std::vector<std::string> dropped;                // constant predictors
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n = 0;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
};

namespace dyadstats {

// 1-based ranks with average ranks for ties.
std::vector<double> average_ranks(const double* v, std::size_t n);
std::vector<double> average_ranks(const std::vector<double>& v);

// Linear-interpolation quantile (type 7) over an ascending-sorted vector.
double sorted_quantile(const std::vector<double>& sorted, double q);

// Correlation of the residuals of cols[0] and cols[1] after projecting out
// cols[2..2+n_controls) plus an intercept, all of length m. No controls
// reduces to plain Pearson. Controls that are collinear with earlier ones
// (or with the intercept) are skipped; their indices land in `dropped`.
// Returns nullopt when either residual vector has no variance.
std::optional<double> residual_correlation(const double* const* cols, std::size_t n_controls,
                                           std::size_t m,
                                           std::vector<std::size_t>* dropped = nullptr);

double mantel(const DyadMatrix& x, const DyadMatrix& y, Method method);

double partial_mantel(const DyadMatrix& x, const DyadMatrix& y,
                      const std::vector<const DyadMatrix*>& controls, Method method,
                      Findings* audit = nullptr,
                      const std::vector<std::string>* control_names = nullptr);

std::pair<double, double> bootstrap_ci(const DyadMatrix& x, const DyadMatrix& y,
                                       const std::vector<const DyadMatrix*>& controls,
                                       Method method, std::size_t replicates, std::uint64_t seed,
                                       int jobs = 1);

struct MantelOptions {
    Method method = Method::pearson;
    std::size_t replicates = 1000;  // 0 skips the bootstrap
    std::uint64_t seed = 0;
    int jobs = 1;
    std::vector<std::string> control_names;  // aligned with the control list
};

// Point estimate plus bootstrap CI in one result record.
MantelResult mantel_analysis(const DyadMatrix& x, const DyadMatrix& y,
                             const std::vector<const DyadMatrix*>& controls,
                             const MantelOptions& options, Findings* audit = nullptr);

// Exact one-sided upper tail P(X >= successes), X ~ Binomial(n, p).
double binomial_tail(int successes, int n, double p);

// min(1, 2 * min(upper tail, lower tail)).
double binomial_two_sided(int successes, int n, double p);

// Spearman partial correlation on per-corporation vectors: everything is
// rank-transformed, then x and y are residualized on the controls.
double partial_rank_corr(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<const std::vector<double>*>& controls);

RankCorrResult partial_rank_corr_ci(const std::vector<double>& x, const std::vector<double>& y,
                                    const std::vector<const std::vector<double>*>& controls,
                                    std::size_t replicates, std::uint64_t seed, int jobs = 1);

struct RegressionOptions {
    std::size_t replicates = 1000;  // 0 skips the bootstrap
    std::uint64_t seed = 0;
    int jobs = 1;
};

// Ordinary least squares of the raw response on z-scored predictors plus
// an intercept, with case-resampling bootstrap CIs per coefficient.
RegressionResult regress(const std::vector<double>& response,
                         const std::vector<std::pair<std::string, std::vector<double>>>& predictors,
                         const RegressionOptions& options, Findings* audit = nullptr);

}  // namespace dyadstats

}  // namespace interlock

#include <algorithm>
#include <bit>
#include <cfloat>
#include <cmath>
#include <cstring>
#include <numeric>

#include "interlock/dyadstats.hpp"
#include "interlock/kernels.hpp"
#include "interlock/linalg.hpp"
#include "interlock/parallel.hpp"
#include "interlock/rng.hpp"

namespace interlock {

std::optional<Method> parse_method(std::string_view name) {
    if (name == "pearson") return Method::pearson;
    if (name == "spearman") return Method::spearman;
    return std::nullopt;
}

namespace dyadstats {

namespace {

constexpr std::size_t kMaxControls = 12;
constexpr double kPivotTol = 1e-10;
constexpr double kVarianceTol = 1e-10;
constexpr std::size_t kCountingMax = 1u << 16;

double dot_small(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

double sorted_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    if (sorted.size() == 1) return sorted[0];
    double h = double(sorted.size() - 1) * q;
    double lo = std::floor(h);
    std::size_t i = std::size_t(lo);
    if (i + 1 >= sorted.size()) return sorted.back();
    return sorted[i] + (h - lo) * (sorted[i + 1] - sorted[i]);
}

std::vector<double> average_ranks(const double* v, std::size_t n) {
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && v[order[j]] == v[order[i]]) ++j;
        double avg = 0.5 * double(i + j + 1);
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
        i = j;
    }
    return ranks;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
    return average_ranks(v.data(), v.size());
}

std::optional<double> residual_correlation(const double* const* cols, std::size_t n_controls,
                                           std::size_t m, std::vector<std::size_t>* dropped) {
    if (n_controls > kMaxControls) throw Error("too many control vectors");
    if (m == 0) return std::nullopt;
    const std::size_t q = n_controls + 2;

    double gram[(kMaxControls + 2) * (kMaxControls + 2)];
    kernels::gram_upper(cols, int(q), m, gram);
    double sums[kMaxControls + 2];
    for (std::size_t c = 0; c < q; ++c) sums[c] = kernels::sum(cols[c], m);

    std::size_t active[kMaxControls];
    std::size_t p = n_controls;
    for (std::size_t c = 0; c < p; ++c) active[c] = c;

    constexpr std::size_t kZ = kMaxControls + 1;
    double chol[kZ * kZ];
    std::size_t pz = 0;
    for (;;) {
        pz = p + 1;
        chol[0] = double(m);
        for (std::size_t c = 0; c < p; ++c) {
            double s = sums[2 + active[c]];
            chol[0 * pz + (1 + c)] = s;
            chol[(1 + c) * pz + 0] = s;
        }
        for (std::size_t c = 0; c < p; ++c)
            for (std::size_t d = 0; d < p; ++d)
                chol[(1 + c) * pz + (1 + d)] = gram[(2 + active[c]) * q + (2 + active[d])];

        std::size_t failed = 0;
        if (linalg::cholesky_small(chol, pz, kPivotTol, &failed)) break;
        if (failed == 0) return std::nullopt;
        if (dropped) dropped->push_back(active[failed - 1]);
        for (std::size_t c = failed - 1; c + 1 < p; ++c) active[c] = active[c + 1];
        --p;
    }

    double ztx[kZ], zty[kZ], bx[kZ], by[kZ];
    ztx[0] = sums[0];
    zty[0] = sums[1];
    for (std::size_t c = 0; c < p; ++c) {
        ztx[1 + c] = gram[0 * q + (2 + active[c])];
        zty[1 + c] = gram[1 * q + (2 + active[c])];
    }
    linalg::cholesky_solve(chol, pz, ztx, bx);
    linalg::cholesky_solve(chol, pz, zty, by);

    double xx = gram[0 * q + 0];
    double yy = gram[1 * q + 1];
    double xy = gram[0 * q + 1];
    double exx = xx - dot_small(bx, ztx, pz);
    double eyy = yy - dot_small(by, zty, pz);
    double exy = 0.5 * ((xy - dot_small(bx, zty, pz)) + (xy - dot_small(by, ztx, pz)));

    double scale_x = std::max(xx, DBL_MIN);
    double scale_y = std::max(yy, DBL_MIN);
    if (!(exx > kVarianceTol * scale_x) || !(eyy > kVarianceTol * scale_y)) return std::nullopt;
    double r = exy / (std::sqrt(exx) * std::sqrt(eyy));
    if (!std::isfinite(r)) return std::nullopt;
    return std::clamp(r, -1.0, 1.0);
}

namespace {

// Per-thread bootstrap buffers; sized once per run.
struct Workspace {
    std::vector<std::uint32_t> idx;
    std::vector<double> columns;  // one m-length row per input vector
    std::vector<const double*> ptrs;
    std::vector<std::uint32_t> ord;
    std::vector<std::uint32_t> counts;
    std::vector<double> rank_of;
    std::vector<std::uint64_t> keys, keys_tmp;

    Workspace(std::size_t n, std::size_t m, std::size_t ncols, bool spearman, bool radix) {
        idx.resize(n);
        columns.resize(ncols * m);
        ptrs.resize(ncols);
        for (std::size_t c = 0; c < ncols; ++c) ptrs[c] = columns.data() + c * m;
        if (spearman) {
            ord.resize(m);
            counts.resize(kCountingMax);
            rank_of.resize(kCountingMax);
            if (radix) {
                keys.resize(m);
                keys_tmp.resize(m);
            }
        }
    }

    double* row(std::size_t c, std::size_t m) { return columns.data() + c * m; }
};

// Average ranks (scaled by 1/m) of a replicate's gathered ordinal vector.
void rank_into(const std::uint32_t* ord, std::size_t m, std::size_t n_ordinals, double* out,
               Workspace& ws) {
    const double inv = 1.0 / double(m);
    if (n_ordinals <= kCountingMax) {
        std::fill(ws.counts.begin(), ws.counts.begin() + n_ordinals, 0u);
        for (std::size_t t = 0; t < m; ++t) ++ws.counts[ord[t]];
        std::size_t running = 0;
        for (std::size_t o = 0; o < n_ordinals; ++o) {
            std::uint32_t c = ws.counts[o];
            ws.rank_of[o] = (double(running) + 0.5 * double(c + 1)) * inv;
            running += c;
        }
        for (std::size_t t = 0; t < m; ++t) out[t] = ws.rank_of[ord[t]];
        return;
    }

    const unsigned pos_bits = unsigned(std::bit_width(m));
    const std::uint64_t pos_mask = (std::uint64_t(1) << pos_bits) - 1;
    for (std::size_t t = 0; t < m; ++t)
        ws.keys[t] = (std::uint64_t(ord[t]) << pos_bits) | std::uint64_t(t);
    const unsigned ord_bits = unsigned(std::bit_width(std::uint64_t(n_ordinals - 1)));
    const unsigned passes = (ord_bits + 10) / 11;
    std::uint64_t* src = ws.keys.data();
    std::uint64_t* dst = ws.keys_tmp.data();
    for (unsigned pass = 0; pass < passes; ++pass) {
        const unsigned shift = pos_bits + 11 * pass;
        std::uint32_t hist[2048];
        std::memset(hist, 0, sizeof hist);
        for (std::size_t t = 0; t < m; ++t) ++hist[(src[t] >> shift) & 2047u];
        std::uint32_t base = 0;
        for (std::uint32_t d = 0; d < 2048; ++d) {
            std::uint32_t c = hist[d];
            hist[d] = base;
            base += c;
        }
        for (std::size_t t = 0; t < m; ++t) dst[hist[(src[t] >> shift) & 2047u]++] = src[t];
        std::swap(src, dst);
    }
    std::size_t i = 0;
    while (i < m) {
        const std::uint64_t o = src[i] >> pos_bits;
        std::size_t j = i;
        while (j < m && (src[j] >> pos_bits) == o) ++j;
        const double avg = 0.5 * double(i + j + 1) * inv;
        for (std::size_t k = i; k < j; ++k) out[src[k] & pos_mask] = avg;
        i = j;
    }
}

class MantelAnalysis {
public:
    MantelAnalysis(const DyadMatrix& x, const DyadMatrix& y,
                   const std::vector<const DyadMatrix*>& controls, Method method, Findings* audit,
                   const std::vector<std::string>* names)
        : method_(method), n_(x.size()), m_(x.dyad_count()) {
        if (y.size() != n_) throw Error("Mantel inputs differ in dimension");
        if (x.ids() != y.ids()) throw Error("Mantel inputs index different node sets");
        for (const DyadMatrix* c : controls) {
            if (c->size() != n_) throw Error("control matrix differs in dimension");
            if (c->ids() != x.ids()) throw Error("control matrix indexes a different node set");
        }
        if (n_ < 3) throw Error("Mantel needs at least three nodes");
        if (controls.size() > kMaxControls) throw Error("too many control matrices");
        if (m_ < controls.size() + 2)
            throw Error("not enough dyads for this many controls");

        auto name_of = [&](std::size_t i) {
            if (names && i < names->size()) return (*names)[i];
            return "control_" + std::to_string(i);
        };

        std::vector<std::vector<double>> uppers;
        uppers.reserve(controls.size() + 2);
        uppers.push_back(x.upper_values());
        uppers.push_back(y.upper_values());
        for (const DyadMatrix* c : controls) uppers.push_back(c->upper_values());
        if (method_ == Method::spearman) {
            const double inv = 1.0 / double(m_);
            for (auto& u : uppers) {
                u = average_ranks(u);
                for (double& v : u) v *= inv;
            }
        }

        std::vector<const double*> cols(uppers.size());
        for (std::size_t c = 0; c < uppers.size(); ++c) cols[c] = uppers[c].data();
        std::vector<std::size_t> dropped;
        auto r = residual_correlation(cols.data(), controls.size(), m_, &dropped);

        std::vector<bool> keep(controls.size(), true);
        for (std::size_t d : dropped) {
            keep[d] = false;
            if (audit)
                audit->push_back({Finding::Severity::warning, name_of(d),
                                  "collinear with the other controls, dropped"});
        }
        mats_.push_back(&x);
        mats_.push_back(&y);
        for (std::size_t c = 0; c < controls.size(); ++c)
            if (keep[c]) {
                mats_.push_back(controls[c]);
                used_names_.push_back(name_of(c));
            }

        if (!r) {
            if (mats_.size() > 2)
                throw Error("zero residual variance: a dyad vector is fully explained by the "
                            "controls");
            throw Error("a dyad vector has zero variance, the Mantel statistic is undefined");
        }
        r_ = *r;
    }

    double statistic() const { return r_; }
    std::size_t nodes() const { return n_; }
    std::size_t dyads() const { return m_; }
    const std::vector<std::string>& used_controls() const { return used_names_; }

    std::pair<double, double> bootstrap(std::size_t replicates, std::uint64_t seed, int jobs) {
        if (replicates == 0) throw Error("bootstrap needs replicates");
        if (method_ == Method::spearman) prepare_ordinals();

        std::vector<double> stats(replicates);
        const std::size_t ncols = mats_.size();
        bool radix = false;
        for (std::size_t k : ordinal_counts_)
            if (k > kCountingMax) radix = true;

        parallel_chunks(replicates, jobs, [&](std::size_t lo, std::size_t hi) {
            Workspace ws(n_, m_, ncols, method_ == Method::spearman, radix);
            for (std::size_t rep = lo; rep < hi; ++rep)
                stats[rep] = one_replicate(seed, rep, ws);
        });

        std::sort(stats.begin(), stats.end());
        return {sorted_quantile(stats, 0.025), sorted_quantile(stats, 0.975)};
    }

private:
    void prepare_ordinals() {
        if (!ordinals_.empty()) return;
        ordinals_.resize(mats_.size());
        ordinal_counts_.resize(mats_.size());
        for (std::size_t c = 0; c < mats_.size(); ++c) {
            const DyadMatrix& mat = *mats_[c];
            std::vector<double> values = mat.upper_values();
            std::vector<double> sorted = values;
            std::sort(sorted.begin(), sorted.end());
            sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
            ordinal_counts_[c] = sorted.size();
            auto& ord = ordinals_[c];
            ord.assign(n_ * n_, 0);
            for (std::size_t i = 0; i < n_; ++i)
                for (std::size_t j = i + 1; j < n_; ++j) {
                    auto it = std::lower_bound(sorted.begin(), sorted.end(), mat(i, j));
                    auto o = std::uint32_t(it - sorted.begin());
                    ord[i * n_ + j] = o;
                    ord[j * n_ + i] = o;
                }
        }
    }

    double one_replicate(std::uint64_t seed, std::size_t rep, Workspace& ws) const {
        Rng rng(derive_seed(seed, rep));
        const std::size_t ncols = mats_.size();
        for (int attempt = 0; attempt <= 10; ++attempt) {
            for (std::size_t i = 0; i < n_; ++i) ws.idx[i] = std::uint32_t(rng.below(n_));
            std::size_t kept = 0;
            if (method_ == Method::pearson) {
                for (std::size_t c = 0; c < ncols; ++c)
                    kept = kernels::gather_resampled_dyads(mats_[c]->data(), n_, ws.idx.data(),
                                                           n_, ws.row(c, m_));
            } else {
                for (std::size_t c = 0; c < ncols; ++c) {
                    kept = kernels::gather_resampled_dyads_u32(ordinals_[c].data(), n_,
                                                               ws.idx.data(), n_, ws.ord.data());
                    rank_into(ws.ord.data(), kept, ordinal_counts_[c], ws.row(c, m_), ws);
                }
            }
            if (kept >= 3) {
                auto r = residual_correlation(ws.ptrs.data(), ncols - 2, kept, nullptr);
                if (r) return *r;
            }
        }
        throw Error("bootstrap replicate " + std::to_string(rep) +
                    " stayed degenerate after 10 redraws");
    }

    Method method_;
    std::size_t n_, m_;
    double r_ = 0.0;
    std::vector<const DyadMatrix*> mats_;  // x, y, kept controls
    std::vector<std::string> used_names_;
    std::vector<std::vector<std::uint32_t>> ordinals_;
    std::vector<std::size_t> ordinal_counts_;
};

}  // namespace

double mantel(const DyadMatrix& x, const DyadMatrix& y, Method method) {
    MantelAnalysis analysis(x, y, {}, method, nullptr, nullptr);
    return analysis.statistic();
}

double partial_mantel(const DyadMatrix& x, const DyadMatrix& y,
                      const std::vector<const DyadMatrix*>& controls, Method method,
                      Findings* audit, const std::vector<std::string>* control_names) {
    MantelAnalysis analysis(x, y, controls, method, audit, control_names);
    return analysis.statistic();
}

std::pair<double, double> bootstrap_ci(const DyadMatrix& x, const DyadMatrix& y,
                                       const std::vector<const DyadMatrix*>& controls,
                                       Method method, std::size_t replicates, std::uint64_t seed,
                                       int jobs) {
    if (replicates < 100) throw Error("bootstrap needs at least 100 replicates");
    MantelAnalysis analysis(x, y, controls, method, nullptr, nullptr);
    return analysis.bootstrap(replicates, seed, jobs);
}

MantelResult mantel_analysis(const DyadMatrix& x, const DyadMatrix& y,
                             const std::vector<const DyadMatrix*>& controls,
                             const MantelOptions& options, Findings* audit) {
    MantelAnalysis analysis(x, y, controls, options.method, audit,
                            options.control_names.empty() ? nullptr : &options.control_names);
    MantelResult result;
    result.method = options.method;
    result.r = analysis.statistic();
    result.n_dyads = analysis.dyads();
    result.nodes = analysis.nodes();
    result.controls = analysis.used_controls();
    result.seed = options.seed;
    if (options.replicates > 0) {
        if (options.replicates < 100) throw Error("bootstrap needs at least 100 replicates");
        result.ci = analysis.bootstrap(options.replicates, options.seed, options.jobs);
        result.replicates = options.replicates;
    }
    return result;
}

}  // namespace dyadstats

}  // namespace interlock

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "interlock/controls.hpp"
#include "interlock/dyadstats.hpp"
#include "interlock/graph.hpp"
#include "interlock/ingest.hpp"
#include "interlock/market.hpp"

namespace interlock {

struct PipelineConfig {
    std::vector<Method> methods{Method::pearson, Method::spearman};
    std::size_t replicates = 1000;  // 0 skips every bootstrap CI
    std::uint64_t seed = 0;
    int jobs = 1;
    double max_missing_fraction = 0.05;
    std::size_t min_sector = 10;
    std::size_t null_replicates = 0;  // element-resampling null check, 0 = off
    std::vector<int> cutoffs;         // distance-cutoff robustness, empty = off
};

// One year's analysis inputs: matrices over the corporations that survived
// the price filters, all keyed by ticker, plus full-network statistics.
struct PreparedYear {
    int year = 0;
    std::vector<std::string> tickers;       // ascending
    std::vector<std::string> corporations;  // aligned with tickers
    YearNetwork network;                    // full board network, every corporation
    DyadMatrix distances;                   // full-network hops, analysis nodes only
    DyadMatrix proximity;
    DyadMatrix similarity;
    ControlSet controls;
    std::vector<NodeAttributes> attributes;  // aligned with tickers
    std::vector<double> centrality;          // full-network row means, aligned
    ReturnPanel panel;
    std::vector<PerformanceRecord> performance;  // aligned
    graph::NetworkSummary summary;
    std::vector<std::string> excluded_unpriced;    // corporations without a series
    std::vector<std::string> excluded_incomplete;  // too many missing days
    std::vector<std::string> excluded_flat;        // too short or zero variance
};

struct MantelScope {
    std::string scope;  // "market" or a sector name
    std::size_t nodes = 0;
    std::vector<MantelResult> results;  // one per configured method
};

struct SkippedScope {
    std::string scope;
    std::string reason;
};

struct RegressionScope {
    std::string scope;
    std::string response;  // "beta" or "yearly_return"
    RegressionResult result;
};

struct TraderCorrelations {
    std::size_t nodes = 0;
    RankCorrResult mentions_centrality;
    RankCorrResult mentions_volume;
    RankCorrResult centrality_volume_given_mentions;
};

struct NullSummary {
    Method method = Method::pearson;
    double observed = 0.0;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    double q025 = 0.0;
    double median = 0.0;
    double q95 = 0.0;
    double q975 = 0.0;
    double fraction_below = 0.0;  // share of null draws below the observed r
};

struct CutoffScope {
    int cutoff = 0;
    std::vector<MantelResult> results;  // one per configured method
};

struct YearReport {
    int year = 0;
    graph::NetworkSummary network;
    std::size_t nodes = 0;
    std::vector<std::string> controls_available;
    std::vector<std::string> controls_degenerate;
    bool geography_available = false;
    std::vector<MantelScope> mantel;  // market first, then qualifying sectors
    std::vector<SkippedScope> skipped;
    std::vector<MantelResult> delta;  // empty without a preceding year
    std::vector<RegressionScope> regressions;
    std::optional<TraderCorrelations> trader;
    std::vector<NullSummary> random_null;
    std::vector<CutoffScope> cutoffs;
    std::vector<std::string> excluded_unpriced;
    std::vector<std::string> excluded_incomplete;
    std::vector<std::string> excluded_flat;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    std::size_t min_sector = 0;
    double max_missing_fraction = 0.0;
};

namespace pipeline {

// Deterministic per-analysis seed. Depends on the master seed, the year,
// the analysis kind, and the node set, and on nothing else, so reruns and
// restrictions that keep the node set reproduce the same draws.
std::uint64_t scope_seed(std::uint64_t master, int year, std::string_view tag,
                         const std::vector<std::string>& ids);

PreparedYear prepare_year(const YearDataset& dataset, const PipelineConfig& config,
                          Findings* audit = nullptr);

// Proximity and similarity differences over the two years' common node
// set, tested with the current year's controls restricted to that set.
MantelResult delta_analysis(const PreparedYear& current, const PreparedYear& previous,
                            Method method, const PipelineConfig& config,
                            Findings* audit = nullptr);
MantelResult delta_analysis(const YearDataset& current, const YearDataset& previous,
                            Method method, const PipelineConfig& config,
                            Findings* audit = nullptr);

// Scrambles the proximity dyads by element resampling and recomputes the
// partial Mantel coefficient per replicate.
NullSummary robustness_random_null(const PreparedYear& prep, Method method,
                                   const PipelineConfig& config);

// Disconnects dyads beyond each cutoff (proximity 0) and reruns the
// partial Mantel. A cutoff at or above the diameter reproduces the
// unmodified analysis exactly.
std::vector<CutoffScope> robustness_distance_cutoff(const PreparedYear& prep,
                                                    const std::vector<int>& cutoffs,
                                                    const PipelineConfig& config,
                                                    Findings* audit = nullptr);

// The three partial rank correlations of mentions, centrality and volume
// given price, board size and expert-fraction controls.
TraderCorrelations trader_analysis(const YearDataset& dataset, const PreparedYear& prep,
                                   const PipelineConfig& config);

YearReport analyze_year(const PreparedYear& prep, const YearDataset& dataset,
                        const PreparedYear* previous, const PipelineConfig& config,
                        Findings* audit = nullptr);

YearReport run_year(const YearDataset& dataset, const YearDataset* previous,
                    const PipelineConfig& config, Findings* audit = nullptr);

// Chains prepared years so each one serves as the next one's baseline.
std::vector<YearReport> run_years(const std::vector<YearDataset>& datasets,
                                  const PipelineConfig& config, Findings* audit = nullptr);

}  // namespace pipeline

}  // namespace interlock

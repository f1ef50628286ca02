#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "interlock/dyad_matrix.hpp"
#include "interlock/ingest.hpp"

namespace interlock {

// Knobs for the planted-structure generator. The target covariance of the
// daily returns is a * proximity + b * same_sector + c * identity.
struct SynthConfig {
    int corporations = 300;
    int director_pool = 0;  // 0 sizes the pool automatically
    int board_min = 6;
    int board_max = 12;  // uniform sizes, median 9
    double interlock_probability = 0.15;
    int sector_count = 7;           // first k of the named sectors
    double network_coupling = 0.3;  // a
    double sector_coupling = 0.2;   // b
    double idiosyncratic = 1.0;     // c
    int trading_days = 252;         // return observations per series
    int year = 2020;
    double expert_probability = 0.3;
    double activity_noise = 0.25;
    std::uint64_t seed = 1;
};

namespace synth {

struct GeneratedBoards {
    std::vector<BoardRecord> boards;
    std::vector<CorporationMeta> metas;  // sorted by corporation
};

// Random bipartite director assignment. Each seat reuses an already seated
// director with probability interlock_probability, otherwise mints a fresh
// one, so the expected interlock rate tracks the knob.
GeneratedBoards generate_boards(const SynthConfig& config);

// Correlated daily log returns from the planted covariance, compounded
// multiplicatively from 100 over weekday dates of config.year.
std::vector<PriceSeries> generate_returns(const DyadMatrix& proximity,
                                          const std::vector<CorporationMeta>& metas,
                                          const SynthConfig& config);

// Multiplicative price path from 100; one close per date, one return per
// step between consecutive dates.
PriceSeries price_path(const std::string& ticker, int year, const std::vector<Date>& dates,
                       const std::vector<double>& log_returns);

// First n weekdays of the year, starting January 1 or the first weekday after.
std::vector<Date> weekday_dates(int year, std::size_t count);

// Mentions rise monotonically with centrality, volume with mentions; the
// noise knob blurs both maps (0 keeps them exactly monotone).
std::vector<TraderActivity> generate_trader_activity(const std::vector<std::string>& tickers,
                                                     const std::vector<double>& centrality,
                                                     const SynthConfig& config);

YearDataset generate_dataset(const SynthConfig& config);

// Year pair for difference analyses: the second year redraws the boards of
// a rewire_fraction share of corporations and regenerates returns from the
// updated network.
std::pair<YearDataset, YearDataset> generate_year_pair(const SynthConfig& config,
                                                       double rewire_fraction);

// boards.csv, prices.csv, meta.csv, traders.csv under dir.
void write_csv_bundle(const std::vector<YearDataset>& years, const std::string& dir);

}  // namespace synth

}  // namespace interlock

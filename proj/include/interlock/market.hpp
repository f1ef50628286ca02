#pragma once

#include <string>
#include <vector>

#include "interlock/common.hpp"
#include "interlock/date.hpp"
#include "interlock/dyad_matrix.hpp"
#include "interlock/ingest.hpp"

namespace interlock {

// Daily log returns for the retained stocks of one year. `raw` holds z_ik,
// `standardized` holds R_ik; both are row-major N x M with M = days - 1.
struct ReturnPanel {
    std::vector<std::string> tickers;
    std::vector<Date> days;              // trading calendar, length M + 1
    std::size_t columns = 0;             // M, return observations per stock
    std::vector<double> raw;
    std::vector<double> standardized;
    std::vector<double> mean;            // per-stock mean of z
    std::vector<double> sd;              // per-stock sample sd of z

    std::size_t stocks() const { return tickers.size(); }
    const double* raw_row(std::size_t i) const { return raw.data() + i * columns; }
    const double* std_row(std::size_t i) const { return standardized.data() + i * columns; }
};

struct PerformanceRecord {
    std::string corporation;
    std::string ticker;
    double beta = 0.0;
    double yearly_return = 0.0;
    double mean_log_price = 0.0;
};

namespace market {

// Natural-log daily returns, length M = observations - 1. An empty result
// means the series is too short and the stock is excluded.
std::vector<double> log_returns(const PriceSeries& series);

// Row-standardizes raw return rows (sample sd). Zero-variance rows are
// excluded with a warning to `audit`. All rows must share one length >= 2.
ReturnPanel standardize(std::vector<std::string> tickers,
                        const std::vector<std::vector<double>>& z_rows, std::vector<Date> days,
                        Findings* audit = nullptr);

// S = (1/(M-1)) R R^T, the Pearson correlation matrix of the raw returns.
// Diagonal exactly 1, off-diagonal clamped to [-1, 1].
DyadMatrix similarity_matrix(const ReturnPanel& panel);

// Cross-sectional mean of raw returns per day (equal-weight benchmark).
std::vector<double> benchmark_return(const ReturnPanel& panel);

double beta(const std::vector<double>& z_i, const std::vector<double>& z_b);

double yearly_return(const PriceSeries& series);

double mean_log_price(const PriceSeries& series);

void write_performance(std::ostream& out, const std::vector<PerformanceRecord>& records);

}  // namespace market

}  // namespace interlock

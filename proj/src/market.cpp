#include "interlock/market.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "interlock/csv.hpp"
#include "interlock/kernels.hpp"

namespace interlock {
namespace market {

std::vector<double> log_returns(const PriceSeries& series) {
    if (series.observations.size() < 2) return {};
    std::vector<double> z;
    z.reserve(series.observations.size() - 1);
    for (std::size_t k = 1; k < series.observations.size(); ++k)
        z.push_back(std::log(series.observations[k].close / series.observations[k - 1].close));
    return z;
}

ReturnPanel standardize(std::vector<std::string> tickers,
                        const std::vector<std::vector<double>>& z_rows, std::vector<Date> days,
                        Findings* audit) {
    if (tickers.size() != z_rows.size())
        throw Error("standardize: ticker list and return rows disagree in length");

    ReturnPanel panel;
    panel.days = std::move(days);
    std::size_t m = 0;
    for (const auto& row : z_rows) {
        if (row.empty()) continue;
        if (m == 0) m = row.size();
        if (row.size() != m) throw Error("standardize: return rows have unequal lengths");
    }
    if (m < 2) throw Error("standardize: need at least two return observations per stock");
    panel.columns = m;

    for (std::size_t i = 0; i < z_rows.size(); ++i) {
        const auto& z = z_rows[i];
        if (z.empty()) continue;
        double mean = kernels::sum(z.data(), m) / double(m);
        double ss = 0.0;
        for (double v : z) ss += (v - mean) * (v - mean);
        double sd = std::sqrt(ss / double(m - 1));
        if (sd == 0.0) {
            if (audit)
                audit->push_back({Finding::Severity::warning, tickers[i],
                                  "constant return series, excluded from the panel"});
            continue;
        }
        panel.tickers.push_back(tickers[i]);
        panel.mean.push_back(mean);
        panel.sd.push_back(sd);
        panel.raw.insert(panel.raw.end(), z.begin(), z.end());
        for (double v : z) panel.standardized.push_back((v - mean) / sd);
    }
    return panel;
}

DyadMatrix similarity_matrix(const ReturnPanel& panel) {
    const std::size_t n = panel.stocks();
    const std::size_t m = panel.columns;
    if (m < 2) throw Error("similarity needs at least two return observations");
    DyadMatrix s(panel.tickers, 1.0);
    const double scale = 1.0 / double(m - 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = scale * kernels::dot(panel.std_row(i), panel.std_row(j), m);
            s.set(i, j, std::clamp(v, -1.0, 1.0));
        }
    return s;
}

std::vector<double> benchmark_return(const ReturnPanel& panel) {
    if (panel.stocks() == 0) throw Error("benchmark needs at least one stock");
    std::vector<double> zb(panel.columns, 0.0);
    for (std::size_t i = 0; i < panel.stocks(); ++i) {
        const double* row = panel.raw_row(i);
        for (std::size_t k = 0; k < panel.columns; ++k) zb[k] += row[k];
    }
    for (double& v : zb) v /= double(panel.stocks());
    return zb;
}

double beta(const std::vector<double>& z_i, const std::vector<double>& z_b) {
    if (z_i.size() != z_b.size()) throw Error("beta: return series lengths differ");
    const std::size_t m = z_i.size();
    if (m < 2) throw Error("beta needs at least two observations");
    double mi = kernels::sum(z_i.data(), m) / double(m);
    double mb = kernels::sum(z_b.data(), m) / double(m);
    double cov = 0.0, var = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        double db = z_b[k] - mb;
        cov += (z_i[k] - mi) * db;
        var += db * db;
    }
    if (var == 0.0) throw Error("beta: benchmark return has zero variance");
    return cov / var;
}

double yearly_return(const PriceSeries& series) {
    if (series.observations.size() < 2)
        throw Error("yearly return needs at least two observations for ticker '" + series.ticker +
                    "'");
    return std::log(series.observations.back().close / series.observations.front().close);
}

double mean_log_price(const PriceSeries& series) {
    if (series.observations.empty())
        throw Error("mean log price needs observations for ticker '" + series.ticker + "'");
    double sum = 0.0;
    for (const auto& obs : series.observations) sum += std::log(obs.close);
    return sum / double(series.observations.size());
}

void write_performance(std::ostream& out, const std::vector<PerformanceRecord>& records) {
    CsvWriter writer(out);
    writer.write_row({"ticker", "beta", "yearly_return", "mean_log_price"});
    for (const auto& rec : records)
        writer.write_row({rec.ticker, format_double(rec.beta), format_double(rec.yearly_return),
                          format_double(rec.mean_log_price)});
}

}  // namespace market
}  // namespace interlock

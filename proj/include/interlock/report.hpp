#pragma once

#include <string>
#include <vector>

#include "interlock/pipeline.hpp"

namespace interlock {
namespace report {

// {method, r, ci, replicates, n_dyads, controls, seed}.
std::string mantel_result_json(const MantelResult& result);

std::string year_report_json(const YearReport& report);

// Cross-year tally of sign-consistent significant sector correlations with
// exact binomial tails, plus the 23-of-35 reference computation.
std::string summary_json(const std::vector<YearReport>& reports);

// report_<year>.json per year, the flat CSV tables (mantel_by_sector.csv,
// performance_effects.csv, trader_corr.csv) and summary.json under dir.
void write_reports(const std::string& dir, const std::vector<YearReport>& reports);

// performance_<year>.csv and edges_<year>.csv.
void write_year_data(const std::string& dir, const PreparedYear& prep);

// Dense CSVs of distances, proximity, similarity and each control matrix.
void write_matrices(const std::string& dir, const PreparedYear& prep);

}  // namespace report
}  // namespace interlock

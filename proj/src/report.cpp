#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "interlock/csv.hpp"
#include "interlock/report.hpp"

namespace interlock {
namespace report {

namespace {

using nlohmann::ordered_json;

ordered_json ci_json(const std::optional<std::pair<double, double>>& ci) {
    if (!ci) return nullptr;
    return ordered_json::array({ci->first, ci->second});
}

ordered_json mantel_json(const MantelResult& r) {
    ordered_json j;
    j["method"] = method_name(r.method);
    j["r"] = r.r;
    j["ci"] = ci_json(r.ci);
    j["replicates"] = r.replicates;
    j["n_dyads"] = r.n_dyads;
    j["controls"] = r.controls;
    j["seed"] = r.seed;
    return j;
}

ordered_json rank_corr_json(const RankCorrResult& r) {
    ordered_json j;
    j["rho"] = r.rho;
    j["ci"] = ci_json(r.ci);
    j["replicates"] = r.replicates;
    j["n"] = r.n;
    j["seed"] = r.seed;
    return j;
}

ordered_json optional_json(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

ordered_json network_json(const graph::NetworkSummary& s) {
    ordered_json j;
    j["corporations"] = s.corporations;
    j["links"] = s.links;
    j["median_board_size"] = s.median_board_size;
    j["isolated_fraction"] = s.isolated_fraction;
    j["single_director_link_fraction"] = optional_json(s.single_director_link_fraction);
    j["cross_sector_link_fraction"] = optional_json(s.cross_sector_link_fraction);
    j["mean_finite_distance"] = optional_json(s.mean_finite_distance);
    j["positive_return_fraction"] = optional_json(s.positive_return_fraction);
    return j;
}

ordered_json regression_json(const RegressionScope& scope) {
    ordered_json j;
    j["scope"] = scope.scope;
    j["response"] = scope.response;
    j["n"] = scope.result.n;
    j["intercept"] = scope.result.intercept;
    j["r_squared"] = scope.result.r_squared;
    j["replicates"] = scope.result.replicates;
    j["seed"] = scope.result.seed;
    ordered_json coefs = ordered_json::array();
    for (std::size_t i = 0; i < scope.result.predictors.size(); ++i) {
        ordered_json c;
        c["predictor"] = scope.result.predictors[i];
        c["coef"] = scope.result.coefficients[i];
        c["ci"] = scope.result.cis.empty()
                      ? ordered_json(nullptr)
                      : ordered_json::array(
                            {scope.result.cis[i].first, scope.result.cis[i].second});
        coefs.push_back(std::move(c));
    }
    j["coefficients"] = std::move(coefs);
    j["dropped"] = scope.result.dropped;
    return j;
}

ordered_json report_json(const YearReport& rep) {
    ordered_json j;
    j["year"] = rep.year;
    j["seed"] = rep.seed;
    j["replicates"] = rep.replicates;
    j["min_sector"] = rep.min_sector;
    j["max_missing_fraction"] = rep.max_missing_fraction;
    j["nodes"] = rep.nodes;
    j["network"] = network_json(rep.network);

    ordered_json controls;
    controls["available"] = rep.controls_available;
    controls["degenerate"] = rep.controls_degenerate;
    controls["geography"] = rep.geography_available;
    j["controls"] = std::move(controls);

    ordered_json excluded;
    excluded["unpriced"] = rep.excluded_unpriced;
    excluded["incomplete"] = rep.excluded_incomplete;
    excluded["flat_returns"] = rep.excluded_flat;
    j["excluded"] = std::move(excluded);

    ordered_json mantel = ordered_json::array();
    for (const auto& scope : rep.mantel) {
        ordered_json s;
        s["scope"] = scope.scope;
        s["nodes"] = scope.nodes;
        ordered_json results = ordered_json::array();
        for (const auto& r : scope.results) results.push_back(mantel_json(r));
        s["results"] = std::move(results);
        mantel.push_back(std::move(s));
    }
    j["mantel"] = std::move(mantel);

    ordered_json skipped = ordered_json::array();
    for (const auto& s : rep.skipped) {
        ordered_json row;
        row["sector"] = s.scope;
        row["reason"] = s.reason;
        skipped.push_back(std::move(row));
    }
    j["skipped_sectors"] = std::move(skipped);

    ordered_json delta = ordered_json::array();
    for (const auto& r : rep.delta) delta.push_back(mantel_json(r));
    j["delta"] = std::move(delta);

    ordered_json regressions = ordered_json::array();
    for (const auto& r : rep.regressions) regressions.push_back(regression_json(r));
    j["regressions"] = std::move(regressions);

    if (rep.trader) {
        ordered_json t;
        t["nodes"] = rep.trader->nodes;
        t["mentions_centrality"] = rank_corr_json(rep.trader->mentions_centrality);
        t["mentions_volume"] = rank_corr_json(rep.trader->mentions_volume);
        t["centrality_volume_given_mentions"] =
            rank_corr_json(rep.trader->centrality_volume_given_mentions);
        j["trader"] = std::move(t);
    } else {
        j["trader"] = nullptr;
    }

    ordered_json nulls = ordered_json::array();
    for (const auto& s : rep.random_null) {
        ordered_json row;
        row["method"] = method_name(s.method);
        row["observed"] = s.observed;
        row["replicates"] = s.replicates;
        row["seed"] = s.seed;
        ordered_json q;
        q["q025"] = s.q025;
        q["median"] = s.median;
        q["q95"] = s.q95;
        q["q975"] = s.q975;
        row["quantiles"] = std::move(q);
        row["fraction_below"] = s.fraction_below;
        nulls.push_back(std::move(row));
    }
    j["random_null"] = std::move(nulls);

    ordered_json cuts = ordered_json::array();
    for (const auto& c : rep.cutoffs) {
        ordered_json row;
        row["cutoff"] = c.cutoff;
        ordered_json results = ordered_json::array();
        for (const auto& r : c.results) results.push_back(mantel_json(r));
        row["results"] = std::move(results);
        cuts.push_back(std::move(row));
    }
    j["distance_cutoffs"] = std::move(cuts);
    return j;
}

ordered_json build_summary(const std::vector<YearReport>& reports) {
    ordered_json j;
    ordered_json years = ordered_json::array();
    for (const auto& rep : reports) years.push_back(rep.year);
    j["years"] = std::move(years);

    ordered_json tallies = ordered_json::array();
    for (Method method : {Method::pearson, Method::spearman}) {
        std::size_t trials = 0, successes = 0;
        bool seen = false;
        for (const auto& rep : reports) {
            for (const auto& scope : rep.mantel) {
                for (const auto& r : scope.results) {
                    if (r.method != method) continue;
                    seen = true;
                    if (scope.scope == "market" || !r.ci) continue;
                    ++trials;
                    if (r.r > 0 && r.excludes_zero()) ++successes;
                }
            }
        }
        if (!seen) continue;
        ordered_json row;
        row["method"] = method_name(method);
        row["trials"] = trials;
        row["positive_significant"] = successes;
        row["one_sided_tail"] = dyadstats::binomial_tail(int(successes), int(trials), 0.5);
        row["two_sided_tail"] = dyadstats::binomial_two_sided(int(successes), int(trials), 0.5);
        tallies.push_back(std::move(row));
    }
    j["sector_correlations"] = std::move(tallies);

    ordered_json ref;
    ref["successes"] = 23;
    ref["trials"] = 35;
    ref["one_sided_tail"] = dyadstats::binomial_tail(23, 35, 0.5);
    ref["two_sided_tail"] = dyadstats::binomial_two_sided(23, 35, 0.5);
    ref["reported_value"] = 0.024;
    ref["note"] =
        "exact one-sided tail for 23 of 35 at p = 0.5; the previously reported value "
        "for this count is 0.024";
    j["reference"] = std::move(ref);
    return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("failed writing " + path.string());
}

std::string ci_field(const std::optional<std::pair<double, double>>& ci, bool high) {
    if (!ci) return "";
    return format_double(high ? ci->second : ci->first);
}

}  // namespace

std::string mantel_result_json(const MantelResult& result) {
    return mantel_json(result).dump(2) + "\n";
}

std::string year_report_json(const YearReport& report) {
    return report_json(report).dump(2) + "\n";
}

std::string summary_json(const std::vector<YearReport>& reports) {
    return build_summary(reports).dump(2) + "\n";
}

void write_reports(const std::string& dir, const std::vector<YearReport>& reports) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (const auto& rep : reports)
        write_text(fs::path(dir) / ("report_" + std::to_string(rep.year) + ".json"),
                   year_report_json(rep));
    write_text(fs::path(dir) / "summary.json", summary_json(reports));

    std::ofstream mantel(fs::path(dir) / "mantel_by_sector.csv", std::ios::binary);
    CsvWriter mw(mantel);
    mw.write_row({"year", "sector", "method", "r", "lo", "hi", "n"});
    for (const auto& rep : reports)
        for (const auto& scope : rep.mantel)
            for (const auto& r : scope.results)
                mw.write_row({std::to_string(rep.year), scope.scope, method_name(r.method),
                              format_double(r.r), ci_field(r.ci, false), ci_field(r.ci, true),
                              std::to_string(scope.nodes)});

    std::ofstream effects(fs::path(dir) / "performance_effects.csv", std::ios::binary);
    CsvWriter ew(effects);
    ew.write_row({"year", "sector", "response", "predictor", "coef", "lo", "hi"});
    for (const auto& rep : reports) {
        for (const auto& scope : rep.regressions) {
            const RegressionResult& r = scope.result;
            for (std::size_t i = 0; i < r.predictors.size(); ++i) {
                std::string lo, hi;
                if (!r.cis.empty()) {
                    lo = format_double(r.cis[i].first);
                    hi = format_double(r.cis[i].second);
                }
                ew.write_row({std::to_string(rep.year), scope.scope, scope.response,
                              r.predictors[i], format_double(r.coefficients[i]), lo, hi});
            }
        }
    }

    std::ofstream trader(fs::path(dir) / "trader_corr.csv", std::ios::binary);
    CsvWriter tw(trader);
    tw.write_row({"year", "pair", "rho", "lo", "hi", "n"});
    for (const auto& rep : reports) {
        if (!rep.trader) continue;
        const std::pair<const char*, const RankCorrResult*> rows[]{
            {"mentions_centrality", &rep.trader->mentions_centrality},
            {"mentions_volume", &rep.trader->mentions_volume},
            {"centrality_volume_given_mentions",
             &rep.trader->centrality_volume_given_mentions}};
        for (const auto& [pair_name, r] : rows)
            tw.write_row({std::to_string(rep.year), pair_name, format_double(r->rho),
                          ci_field(r->ci, false), ci_field(r->ci, true), std::to_string(r->n)});
    }
}

void write_year_data(const std::string& dir, const PreparedYear& prep) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string year = std::to_string(prep.year);

    std::ofstream perf(fs::path(dir) / ("performance_" + year + ".csv"), std::ios::binary);
    market::write_performance(perf, prep.performance);

    std::ofstream edges(fs::path(dir) / ("edges_" + year + ".csv"), std::ios::binary);
    graph::write_edges(edges, prep.network);
}

void write_matrices(const std::string& dir, const PreparedYear& prep) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string year = std::to_string(prep.year);
    auto dump = [&](const std::string& name, const DyadMatrix& m) {
        std::ofstream out(fs::path(dir) / (name + "_" + year + ".csv"), std::ios::binary);
        if (!out) throw Error("cannot write matrix " + name);
        write_matrix_csv(out, m);
    };
    dump("distances", prep.distances);
    dump("proximity", prep.proximity);
    dump("similarity", prep.similarity);
    for (const auto& [name, matrix] : prep.controls.available())
        dump("control_" + name, *matrix);
}

}  // namespace report
}  // namespace interlock

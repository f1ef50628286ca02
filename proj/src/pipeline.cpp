#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "interlock/pipeline.hpp"
#include "interlock/rng.hpp"

namespace interlock {
namespace pipeline {

namespace {

void validate(const PipelineConfig& c) {
    if (c.methods.empty()) throw Error("no correlation method selected");
    if (c.replicates != 0 && c.replicates < 100)
        throw Error("bootstrap needs at least 100 replicates");
    if (!(c.max_missing_fraction > 0.0 && c.max_missing_fraction < 0.5))
        throw Error("missing-day threshold must lie in (0, 0.5)");
    if (c.min_sector < 3) throw Error("minimum sector size must be at least 3");
    if (c.jobs < 1) throw Error("jobs must be at least 1");
}

void note(Findings* audit, Finding::Severity severity, std::string where, std::string message) {
    if (audit) audit->push_back({severity, std::move(where), std::move(message)});
}

// Runs build_controls with the scope prepended to every finding location.
ControlSet scoped_controls(const std::vector<NodeAttributes>& nodes, const std::string& scope,
                           Findings* audit) {
    if (!audit) return controls::build_controls(nodes, nullptr);
    Findings local;
    auto cs = controls::build_controls(nodes, &local);
    for (auto& f : local) {
        f.where = scope + ": " + f.where;
        audit->push_back(std::move(f));
    }
    return cs;
}

std::vector<MantelResult> mantel_results(const DyadMatrix& x, const DyadMatrix& y,
                                         const ControlSet& cs, std::uint64_t seed,
                                         const PipelineConfig& config, Findings* audit) {
    std::vector<const DyadMatrix*> mats;
    std::vector<std::string> names;
    for (const auto& [name, matrix] : cs.usable()) {
        names.push_back(name);
        mats.push_back(matrix);
    }
    std::vector<MantelResult> out;
    out.reserve(config.methods.size());
    for (Method method : config.methods) {
        dyadstats::MantelOptions opt;
        opt.method = method;
        opt.replicates = config.replicates;
        opt.seed = seed;
        opt.jobs = config.jobs;
        opt.control_names = names;
        out.push_back(dyadstats::mantel_analysis(x, y, mats, opt, audit));
    }
    return out;
}

}  // namespace

std::uint64_t scope_seed(std::uint64_t master, int year, std::string_view tag,
                         const std::vector<std::string>& ids) {
    std::uint64_t h = fnv1a64(tag);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(std::to_string(year), h);
    for (const auto& id : ids) {
        h = fnv1a64("\x1f", h);
        h = fnv1a64(id, h);
    }
    return derive_seed(master, h);
}

PreparedYear prepare_year(const YearDataset& dataset, const PipelineConfig& config,
                          Findings* audit) {
    validate(config);
    const std::string year_tag = std::to_string(dataset.year);

    PreparedYear prep;
    prep.year = dataset.year;
    prep.network = graph::build_network(dataset);
    DyadMatrix dist_full = graph::all_pairs_distances(prep.network);
    prep.summary = graph::network_summary(prep.network, dist_full, dataset);
    if (prep.network.size() < 3)
        throw Error(year_tag + ": need at least three corporations");
    DyadMatrix prox_full = graph::proximity_matrix(dist_full);
    std::vector<double> central_full = graph::centrality(prox_full);

    std::vector<const PriceSeries*> all_series;
    all_series.reserve(dataset.prices.size());
    for (const auto& [ticker, series] : dataset.prices) all_series.push_back(&series);
    std::vector<Date> calendar = ingest::trading_calendar(all_series);

    struct Kept {
        std::string ticker;
        std::string corp;
        PriceSeries filled;
        std::vector<double> z;
        std::uint32_t node = 0;
    };
    std::vector<Kept> kept;
    for (std::uint32_t i = 0; i < prep.network.size(); ++i) {
        const std::string& corp = prep.network.nodes[i];
        const CorporationMeta& meta = dataset.meta.at(corp);
        auto pit = dataset.prices.find(meta.ticker);
        if (pit == dataset.prices.end()) {
            prep.excluded_unpriced.push_back(corp);
            continue;
        }
        auto filtered =
            ingest::apply_completeness_filter(pit->second, calendar, config.max_missing_fraction);
        if (!filtered.series) {
            prep.excluded_incomplete.push_back(corp);
            note(audit, Finding::Severity::warning, year_tag + ":" + meta.ticker,
                 "missing " + format_double(filtered.missing_fraction) +
                     " of the trading calendar, excluded");
            continue;
        }
        auto z = market::log_returns(*filtered.series);
        if (z.size() < 2) {
            prep.excluded_flat.push_back(corp);
            note(audit, Finding::Severity::warning, year_tag + ":" + meta.ticker,
                 "fewer than two return observations, excluded");
            continue;
        }
        kept.push_back({meta.ticker, corp, std::move(*filtered.series), std::move(z), i});
    }
    std::sort(kept.begin(), kept.end(),
              [](const Kept& a, const Kept& b) { return a.ticker < b.ticker; });

    std::vector<std::string> tickers;
    std::vector<std::vector<double>> z_rows;
    tickers.reserve(kept.size());
    z_rows.reserve(kept.size());
    for (const Kept& k : kept) {
        tickers.push_back(k.ticker);
        z_rows.push_back(k.z);
    }
    if (tickers.empty()) throw Error(year_tag + ": no corporation has a usable price series");
    prep.panel = market::standardize(std::move(tickers), z_rows, calendar, audit);
    if (prep.panel.stocks() < 3)
        throw Error(year_tag + ": fewer than three corporations with usable returns");

    std::map<std::string, const Kept*> by_ticker;
    for (const Kept& k : kept) by_ticker[k.ticker] = &k;
    std::set<std::string> surviving(prep.panel.tickers.begin(), prep.panel.tickers.end());
    for (const Kept& k : kept)
        if (!surviving.count(k.ticker)) prep.excluded_flat.push_back(k.corp);

    prep.tickers = prep.panel.tickers;
    const std::size_t n = prep.tickers.size();
    std::vector<std::uint32_t> nodes(n);
    prep.corporations.reserve(n);
    prep.attributes.reserve(n);
    prep.centrality.reserve(n);
    prep.performance.reserve(n);
    std::vector<double> bench = market::benchmark_return(prep.panel);
    for (std::size_t i = 0; i < n; ++i) {
        const Kept& k = *by_ticker.at(prep.tickers[i]);
        nodes[i] = k.node;
        prep.corporations.push_back(k.corp);
        prep.centrality.push_back(central_full[k.node]);

        const CorporationMeta& meta = dataset.meta.at(k.corp);
        const BoardRecord* board = dataset.board_for(k.corp);
        NodeAttributes at;
        at.id = k.ticker;
        at.sector = meta.sector;
        at.mean_log_price = market::mean_log_price(k.filled);
        at.board_size = double(board->board_size());
        at.expert_fraction = board->expert_fraction();
        at.latitude = meta.latitude;
        at.longitude = meta.longitude;
        prep.attributes.push_back(std::move(at));

        std::vector<double> row(prep.panel.raw_row(i), prep.panel.raw_row(i) + prep.panel.columns);
        PerformanceRecord perf;
        perf.corporation = k.corp;
        perf.ticker = k.ticker;
        perf.beta = market::beta(row, bench);
        perf.yearly_return = market::yearly_return(k.filled);
        perf.mean_log_price = prep.attributes.back().mean_log_price;
        prep.performance.push_back(std::move(perf));
    }

    prep.distances = DyadMatrix(prep.tickers, 0.0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            prep.distances.set(a, b, dist_full(nodes[a], nodes[b]));
    prep.proximity = graph::proximity_matrix(prep.distances);
    prep.similarity = market::similarity_matrix(prep.panel);
    prep.controls = scoped_controls(prep.attributes, year_tag, audit);
    return prep;
}

MantelResult delta_analysis(const PreparedYear& current, const PreparedYear& previous,
                            Method method, const PipelineConfig& config, Findings* audit) {
    validate(config);
    std::vector<std::string> common;
    std::set_intersection(current.tickers.begin(), current.tickers.end(),
                          previous.tickers.begin(), previous.tickers.end(),
                          std::back_inserter(common));
    if (common.size() < 3)
        throw Error("only " + std::to_string(common.size()) +
                    " corporations appear in both years, need at least 3");

    auto positions = [](const std::vector<std::string>& all, const std::vector<std::string>& sub) {
        std::vector<std::uint32_t> idx;
        idx.reserve(sub.size());
        for (const auto& id : sub) {
            auto it = std::lower_bound(all.begin(), all.end(), id);
            idx.push_back(std::uint32_t(it - all.begin()));
        }
        return idx;
    };
    std::vector<std::uint32_t> ci = positions(current.tickers, common);
    std::vector<std::uint32_t> pi = positions(previous.tickers, common);

    const std::size_t n = common.size();
    DyadMatrix dprox(common, 0.0);
    DyadMatrix dsim(common, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            dprox.set(a, b,
                      current.proximity(ci[a], ci[b]) - previous.proximity(pi[a], pi[b]));
            dsim.set(a, b,
                     current.similarity(ci[a], ci[b]) - previous.similarity(pi[a], pi[b]));
        }
    }

    std::vector<DyadMatrix> owned;
    std::vector<const DyadMatrix*> mats;
    std::vector<std::string> names;
    for (const auto& [name, matrix] : current.controls.usable()) {
        owned.push_back(matrix->restricted(ci));
        names.push_back(name);
    }
    for (const auto& m : owned) mats.push_back(&m);

    dyadstats::MantelOptions opt;
    opt.method = method;
    opt.replicates = config.replicates;
    opt.seed = scope_seed(config.seed, current.year, "delta", common);
    opt.jobs = config.jobs;
    opt.control_names = names;
    return dyadstats::mantel_analysis(dprox, dsim, mats, opt, audit);
}

MantelResult delta_analysis(const YearDataset& current, const YearDataset& previous,
                            Method method, const PipelineConfig& config, Findings* audit) {
    PreparedYear cur = prepare_year(current, config, audit);
    PreparedYear prev = prepare_year(previous, config, audit);
    return delta_analysis(cur, prev, method, config, audit);
}

NullSummary robustness_random_null(const PreparedYear& prep, Method method,
                                   const PipelineConfig& config) {
    validate(config);
    if (config.null_replicates == 0) throw Error("null check needs at least one replicate");

    std::vector<const DyadMatrix*> mats;
    for (const auto& [name, matrix] : prep.controls.usable()) mats.push_back(matrix);

    NullSummary summary;
    summary.method = method;
    summary.replicates = config.null_replicates;
    summary.seed = scope_seed(config.seed, prep.year, "null", prep.tickers);
    summary.observed = dyadstats::partial_mantel(prep.proximity, prep.similarity, mats, method);

    Rng rng(summary.seed);
    const std::vector<double> pool = prep.proximity.upper_values();
    const std::size_t n = prep.tickers.size();
    std::vector<double> stats;
    stats.reserve(config.null_replicates);
    for (std::size_t rep = 0; rep < config.null_replicates; ++rep) {
        bool done = false;
        for (int attempt = 0; attempt <= 10 && !done; ++attempt) {
            DyadMatrix scrambled(prep.tickers, 1.0);
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = a + 1; b < n; ++b)
                    scrambled.set(a, b, pool[rng.below(pool.size())]);
            try {
                stats.push_back(
                    dyadstats::partial_mantel(scrambled, prep.similarity, mats, method));
                done = true;
            } catch (const Error&) {
            }
        }
        if (!done)
            throw Error("null replicate " + std::to_string(rep) +
                        " stayed degenerate after 10 redraws");
    }
    std::sort(stats.begin(), stats.end());
    summary.q025 = dyadstats::sorted_quantile(stats, 0.025);
    summary.median = dyadstats::sorted_quantile(stats, 0.5);
    summary.q95 = dyadstats::sorted_quantile(stats, 0.95);
    summary.q975 = dyadstats::sorted_quantile(stats, 0.975);
    std::size_t below = 0;
    for (double s : stats)
        if (s < summary.observed) ++below;
    summary.fraction_below = double(below) / double(stats.size());
    return summary;
}

std::vector<CutoffScope> robustness_distance_cutoff(const PreparedYear& prep,
                                                    const std::vector<int>& cutoffs,
                                                    const PipelineConfig& config,
                                                    Findings* audit) {
    validate(config);
    for (int c : cutoffs)
        if (c < 1) throw Error("distance cutoffs must be at least 1");

    const std::uint64_t seed = scope_seed(config.seed, prep.year, "mantel", prep.tickers);
    const std::size_t n = prep.tickers.size();
    std::vector<CutoffScope> out;
    out.reserve(cutoffs.size());
    for (int cutoff : cutoffs) {
        DyadMatrix prox(prep.tickers, 1.0);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                double d = prep.distances(a, b);
                if (!std::isinf(d) && d <= double(cutoff)) prox.set(a, b, 1.0 / d);
            }
        }
        out.push_back(
            {cutoff, mantel_results(prox, prep.similarity, prep.controls, seed, config, audit)});
    }
    return out;
}

TraderCorrelations trader_analysis(const YearDataset& dataset, const PreparedYear& prep,
                                   const PipelineConfig& config) {
    validate(config);
    std::vector<std::uint32_t> overlap;
    for (std::uint32_t i = 0; i < prep.tickers.size(); ++i)
        if (dataset.traders.count(prep.tickers[i])) overlap.push_back(i);
    if (overlap.size() < 10)
        throw Error("only " + std::to_string(overlap.size()) +
                    " corporations carry trader activity, need at least 10");

    std::vector<std::string> ids;
    std::vector<double> mentions, volume, central, price, board, expert;
    for (std::uint32_t i : overlap) {
        const TraderActivity& activity = dataset.traders.at(prep.tickers[i]);
        ids.push_back(prep.tickers[i]);
        mentions.push_back(double(activity.mentions));
        volume.push_back(activity.volume);
        central.push_back(prep.centrality[i]);
        price.push_back(prep.attributes[i].mean_log_price);
        board.push_back(prep.attributes[i].board_size);
        expert.push_back(prep.attributes[i].expert_fraction);
    }
    const std::uint64_t seed = scope_seed(config.seed, prep.year, "trader", ids);
    const std::vector<const std::vector<double>*> base{&price, &board, &expert};
    std::vector<const std::vector<double>*> with_mentions{&mentions};
    with_mentions.insert(with_mentions.end(), base.begin(), base.end());

    TraderCorrelations tc;
    tc.nodes = overlap.size();
    tc.mentions_centrality = dyadstats::partial_rank_corr_ci(mentions, central, base,
                                                             config.replicates, seed, config.jobs);
    tc.mentions_volume = dyadstats::partial_rank_corr_ci(mentions, volume, base,
                                                         config.replicates, seed, config.jobs);
    tc.centrality_volume_given_mentions = dyadstats::partial_rank_corr_ci(
        central, volume, with_mentions, config.replicates, seed, config.jobs);
    return tc;
}

YearReport analyze_year(const PreparedYear& prep, const YearDataset& dataset,
                        const PreparedYear* previous, const PipelineConfig& config,
                        Findings* audit) {
    validate(config);
    const std::string year_tag = std::to_string(prep.year);

    YearReport rep;
    rep.year = prep.year;
    rep.network = prep.summary;
    rep.nodes = prep.tickers.size();
    for (const auto& [name, matrix] : prep.controls.available())
        rep.controls_available.push_back(name);
    rep.controls_degenerate = prep.controls.degenerate;
    rep.geography_available = prep.controls.geography.has_value();
    rep.excluded_unpriced = prep.excluded_unpriced;
    rep.excluded_incomplete = prep.excluded_incomplete;
    rep.excluded_flat = prep.excluded_flat;
    rep.replicates = config.replicates;
    rep.seed = config.seed;
    rep.min_sector = config.min_sector;
    rep.max_missing_fraction = config.max_missing_fraction;

    try {
        const std::uint64_t seed = scope_seed(config.seed, prep.year, "mantel", prep.tickers);
        rep.mantel.push_back(
            {"market", prep.tickers.size(),
             mantel_results(prep.proximity, prep.similarity, prep.controls, seed, config, audit)});
    } catch (const Error& e) {
        note(audit, Finding::Severity::error, year_tag + ":market", e.what());
    }

    std::vector<std::pair<std::string, std::vector<std::uint32_t>>> sector_members;
    for (const auto& sector : ingest::kNamedSectors) {
        std::vector<std::uint32_t> members;
        for (std::uint32_t i = 0; i < prep.attributes.size(); ++i)
            if (prep.attributes[i].sector == sector) members.push_back(i);
        if (members.size() < config.min_sector) {
            rep.skipped.push_back({sector, std::to_string(members.size()) +
                                               " corporations, minimum is " +
                                               std::to_string(config.min_sector)});
            continue;
        }
        sector_members.emplace_back(sector, std::move(members));
    }

    for (const auto& [sector, members] : sector_members) {
        try {
            DyadMatrix x = prep.proximity.restricted(members);
            DyadMatrix y = prep.similarity.restricted(members);
            std::vector<NodeAttributes> subset;
            subset.reserve(members.size());
            for (std::uint32_t i : members) subset.push_back(prep.attributes[i]);
            ControlSet cs = scoped_controls(subset, year_tag + ":" + sector, audit);
            const std::uint64_t seed = scope_seed(config.seed, prep.year, "mantel", x.ids());
            rep.mantel.push_back({sector, members.size(), mantel_results(x, y, cs, seed, config, audit)});
        } catch (const Error& e) {
            rep.skipped.push_back({sector, e.what()});
            note(audit, Finding::Severity::warning, year_tag + ":" + sector, e.what());
        }
    }

    auto run_regressions = [&](const std::string& scope, const std::vector<std::uint32_t>& members) {
        std::vector<std::string> ids;
        std::vector<double> beta_v, return_v, central, price, board, expert;
        for (std::uint32_t i : members) {
            ids.push_back(prep.tickers[i]);
            beta_v.push_back(prep.performance[i].beta);
            return_v.push_back(prep.performance[i].yearly_return);
            central.push_back(prep.centrality[i]);
            price.push_back(prep.attributes[i].mean_log_price);
            board.push_back(prep.attributes[i].board_size);
            expert.push_back(prep.attributes[i].expert_fraction);
        }
        dyadstats::RegressionOptions opt;
        opt.replicates = config.replicates;
        opt.seed = scope_seed(config.seed, prep.year, "regress", ids);
        opt.jobs = config.jobs;
        const std::vector<std::pair<std::string, std::vector<double>>> predictors{
            {"centrality", central},
            {"mean_log_price", price},
            {"board_size", board},
            {"expert_fraction", expert}};
        const std::pair<std::string, const std::vector<double>*> responses[]{
            {"beta", &beta_v}, {"yearly_return", &return_v}};
        for (const auto& [name, values] : responses) {
            try {
                Findings local;
                auto result = dyadstats::regress(*values, predictors, opt, audit ? &local : nullptr);
                if (audit)
                    for (auto& f : local) {
                        f.where = year_tag + ":" + scope + ":" + name + ":" + f.where;
                        audit->push_back(std::move(f));
                    }
                rep.regressions.push_back({scope, name, std::move(result)});
            } catch (const Error& e) {
                note(audit, Finding::Severity::warning, year_tag + ":" + scope + ":" + name,
                     e.what());
            }
        }
    };

    std::vector<std::uint32_t> everyone(prep.tickers.size());
    for (std::uint32_t i = 0; i < everyone.size(); ++i) everyone[i] = i;
    run_regressions("market", everyone);
    for (const auto& [sector, members] : sector_members) run_regressions(sector, members);

    if (!dataset.traders.empty()) {
        try {
            rep.trader = trader_analysis(dataset, prep, config);
        } catch (const Error& e) {
            note(audit, Finding::Severity::error, year_tag + ":trader", e.what());
        }
    }

    if (previous) {
        for (Method method : config.methods) {
            try {
                rep.delta.push_back(delta_analysis(prep, *previous, method, config, audit));
            } catch (const Error& e) {
                note(audit, Finding::Severity::error, year_tag + ":delta", e.what());
                break;
            }
        }
    }

    if (config.null_replicates > 0) {
        for (Method method : config.methods) {
            try {
                rep.random_null.push_back(robustness_random_null(prep, method, config));
            } catch (const Error& e) {
                note(audit, Finding::Severity::error, year_tag + ":null", e.what());
            }
        }
    }
    if (!config.cutoffs.empty()) {
        try {
            rep.cutoffs = robustness_distance_cutoff(prep, config.cutoffs, config, audit);
        } catch (const Error& e) {
            note(audit, Finding::Severity::error, year_tag + ":cutoffs", e.what());
        }
    }
    return rep;
}

YearReport run_year(const YearDataset& dataset, const YearDataset* previous,
                    const PipelineConfig& config, Findings* audit) {
    PreparedYear prep = prepare_year(dataset, config, audit);
    std::optional<PreparedYear> prev;
    if (previous) prev = prepare_year(*previous, config, audit);
    return analyze_year(prep, dataset, prev ? &*prev : nullptr, config, audit);
}

std::vector<YearReport> run_years(const std::vector<YearDataset>& datasets,
                                  const PipelineConfig& config, Findings* audit) {
    validate(config);
    std::vector<YearReport> reports;
    std::optional<PreparedYear> previous;
    for (const auto& dataset : datasets) {
        std::optional<PreparedYear> prep;
        try {
            prep = prepare_year(dataset, config, audit);
        } catch (const Error& e) {
            if (!audit) throw;
            note(audit, Finding::Severity::error, std::to_string(dataset.year), e.what());
            previous.reset();
            continue;
        }
        const PreparedYear* link =
            previous && previous->year == dataset.year - 1 ? &*previous : nullptr;
        reports.push_back(analyze_year(*prep, dataset, link, config, audit));
        previous = std::move(prep);
    }
    return reports;
}

}  // namespace pipeline
}  // namespace interlock

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "interlock/graph.hpp"
#include "interlock/linalg.hpp"
#include "interlock/rng.hpp"
#include "interlock/synth.hpp"

namespace interlock {
namespace synth {

namespace {

constexpr double kDailyScale = 0.01;

void validate(const SynthConfig& c) {
    if (c.corporations < 2) throw Error("need at least two corporations");
    if (c.board_min < 1 || c.board_max < c.board_min) throw Error("infeasible board sizes");
    if (c.director_pool > 0 && c.director_pool < c.board_max)
        throw Error("director pool smaller than the largest board");
    if (c.sector_count < 1 || std::size_t(c.sector_count) > ingest::kNamedSectors.size())
        throw Error("sector count must be between 1 and " +
                    std::to_string(ingest::kNamedSectors.size()));
    if (!(c.interlock_probability >= 0.0 && c.interlock_probability < 1.0))
        throw Error("interlock probability must lie in [0, 1)");
    if (!(c.expert_probability >= 0.0 && c.expert_probability <= 1.0))
        throw Error("expert probability must lie in [0, 1]");
    if (c.network_coupling < 0.0 || c.sector_coupling < 0.0)
        throw Error("coupling strengths must be nonnegative");
    if (!(c.idiosyncratic > 0.0)) throw Error("idiosyncratic variance must be positive");
    if (c.trading_days < 2) throw Error("need at least two trading days");
    if (!(c.activity_noise >= 0.0)) throw Error("activity noise must be nonnegative");
}

std::string format_id(char prefix, int k, int width) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%0*d", prefix, width, k);
    return buf;
}

std::uint64_t stream_seed(std::uint64_t master, std::string_view tag, int year) {
    return derive_seed(master, fnv1a64(std::to_string(year), fnv1a64(tag)));
}

struct DirectorRegistry {
    std::vector<std::string> seated;  // on at least one finished board
    std::map<std::string, bool> expert;
    int next_id = 1;
    int pool_cap = 0;  // 0 means unbounded

    std::string mint(Rng& rng, double expert_probability) {
        if (pool_cap > 0 && next_id > pool_cap)
            throw Error("director pool exhausted, raise the pool or shrink the boards");
        std::string id = format_id('D', next_id++, 6);
        expert.emplace(id, rng.uniform01() <= expert_probability);
        return id;
    }
};

std::vector<std::string> draw_board(Rng& rng, DirectorRegistry& reg, const SynthConfig& c) {
    const int size = c.board_min + int(rng.below(std::uint64_t(c.board_max - c.board_min) + 1));
    std::set<std::string> members;
    std::vector<std::string> fresh;
    while (int(members.size()) < size) {
        if (!reg.seated.empty() && rng.uniform01() <= c.interlock_probability) {
            bool placed = false;
            for (int attempt = 0; attempt < 64 && !placed; ++attempt)
                placed = members.insert(reg.seated[rng.below(reg.seated.size())]).second;
            if (placed) continue;
        }
        std::string id = reg.mint(rng, c.expert_probability);
        fresh.push_back(id);
        members.insert(std::move(id));
    }
    for (auto& id : fresh) reg.seated.push_back(std::move(id));
    return {members.begin(), members.end()};
}

BoardRecord make_board(const std::string& corp, int year, Rng& rng, DirectorRegistry& reg,
                       const SynthConfig& c) {
    BoardRecord rec;
    rec.year = year;
    rec.corporation = corp;
    rec.directors = draw_board(rng, reg, c);
    rec.expert_flags.reserve(rec.directors.size());
    for (const auto& d : rec.directors) rec.expert_flags.push_back(reg.expert.at(d));
    return rec;
}

GeneratedBoards boards_with(Rng& rng, DirectorRegistry& reg, const SynthConfig& config) {
    GeneratedBoards out;
    out.boards.reserve(config.corporations);
    out.metas.reserve(config.corporations);
    for (int k = 1; k <= config.corporations; ++k) {
        const std::string corp = format_id('C', k, 5);
        out.boards.push_back(make_board(corp, config.year, rng, reg, config));

        CorporationMeta meta;
        meta.corporation = corp;
        meta.ticker = format_id('T', k, 5);
        meta.sector = ingest::kNamedSectors[rng.below(std::uint64_t(config.sector_count))];
        meta.latitude = rng.uniform(25.0, 49.0);
        meta.longitude = rng.uniform(-124.0, -67.0);
        out.metas.push_back(std::move(meta));
    }
    return out;
}

std::vector<double> factor_with_ridge(const std::vector<double>& sigma, std::size_t n) {
    std::vector<double> attempt = sigma;
    if (linalg::cholesky_factor(attempt, n)) return attempt;
    // Start from the iterative estimate to keep the ridge small, but escalate
    // until the Gershgorin bound guarantees positive definiteness; the
    // estimate alone can miss clustered bottom eigenvalues.
    double gershgorin = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double off = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) off += std::abs(sigma[i * n + j]);
        gershgorin = std::min(gershgorin, sigma[i * n + i] - off);
    }
    double lambda = linalg::smallest_eigenvalue_estimate(sigma.data(), n);
    double ridge = std::abs(std::min(lambda, 0.0)) + 1e-6;
    const double ceiling = std::abs(gershgorin) + 1.0;
    while (ridge <= ceiling * 10.0) {
        attempt = sigma;
        for (std::size_t i = 0; i < n; ++i) attempt[i * n + i] += ridge;
        if (linalg::cholesky_factor(attempt, n)) return attempt;
        ridge *= 10.0;
    }
    throw Error("planted covariance stayed non positive definite after ridge adjustment");
}

// Dense ranks: equal inputs share a rank, distinct inputs never collide.
std::vector<std::size_t> dense_ranks(const std::vector<double>& v) {
    std::vector<double> sorted(v);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<std::size_t> ranks(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        ranks[i] = std::size_t(std::lower_bound(sorted.begin(), sorted.end(), v[i]) -
                               sorted.begin());
    return ranks;
}

YearDataset assemble_one(const GeneratedBoards& gb, const SynthConfig& config) {
    auto skeleton = ingest::assemble_years(gb.boards, gb.metas, {}, {});
    const YearDataset& bare = skeleton.front();

    auto net = graph::build_network(bare);
    auto distances = graph::all_pairs_distances(net);
    auto proximity = graph::proximity_matrix(distances);
    auto prices = generate_returns(proximity, gb.metas, config);

    auto central = graph::centrality(proximity);
    std::vector<std::string> tickers;
    tickers.reserve(proximity.ids().size());
    for (const auto& corp : proximity.ids()) tickers.push_back(bare.meta.at(corp).ticker);
    auto traders = generate_trader_activity(tickers, central, config);

    auto years = ingest::assemble_years(gb.boards, gb.metas, std::move(prices),
                                        std::move(traders));
    return std::move(years.front());
}

}  // namespace

GeneratedBoards generate_boards(const SynthConfig& config) {
    validate(config);
    Rng rng(stream_seed(config.seed, "boards", config.year));
    DirectorRegistry reg;
    reg.pool_cap = config.director_pool;
    return boards_with(rng, reg, config);
}

std::vector<Date> weekday_dates(int year, std::size_t count) {
    std::vector<Date> dates;
    dates.reserve(count);
    Date d{year, 1, 1};
    while (dates.size() < count) {
        if (d.weekday() < 5) dates.push_back(d);
        d = d.next_day();
    }
    return dates;
}

PriceSeries price_path(const std::string& ticker, int year, const std::vector<Date>& dates,
                       const std::vector<double>& log_returns) {
    if (dates.size() != log_returns.size() + 1)
        throw Error("need exactly one more date than return");
    PriceSeries series;
    series.ticker = ticker;
    series.year = year;
    series.observations.reserve(dates.size());
    double close = 100.0;
    series.observations.push_back({dates[0], close});
    for (std::size_t t = 0; t < log_returns.size(); ++t) {
        close *= std::exp(log_returns[t]);
        series.observations.push_back({dates[t + 1], close});
    }
    return series;
}

std::vector<PriceSeries> generate_returns(const DyadMatrix& proximity,
                                          const std::vector<CorporationMeta>& metas,
                                          const SynthConfig& config) {
    validate(config);
    const std::size_t n = proximity.ids().size();
    std::map<std::string, const CorporationMeta*> by_corp;
    for (const auto& m : metas) by_corp[m.corporation] = &m;
    std::vector<const CorporationMeta*> meta_of(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = by_corp.find(proximity.ids()[i]);
        if (it == by_corp.end())
            throw Error("no metadata for corporation " + proximity.ids()[i]);
        meta_of[i] = it->second;
    }

    const double a = config.network_coupling;
    const double b = config.sector_coupling;
    const double c = config.idiosyncratic;
    std::vector<double> sigma(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        sigma[i * n + i] = a + b + c;
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = a * proximity(i, j) +
                       (meta_of[i]->sector == meta_of[j]->sector ? b : 0.0);
            sigma[i * n + j] = v;
            sigma[j * n + i] = v;
        }
    }
    std::vector<double> chol = factor_with_ridge(sigma, n);

    const std::size_t m = std::size_t(config.trading_days);
    Rng rng(stream_seed(config.seed, "returns", config.year));
    std::vector<double> w(n), r(n);
    std::vector<std::vector<double>> returns(n, std::vector<double>(m));
    for (std::size_t t = 0; t < m; ++t) {
        for (std::size_t i = 0; i < n; ++i) w[i] = rng.normal();
        linalg::lower_multiply(chol, n, w.data(), r.data());
        for (std::size_t i = 0; i < n; ++i) returns[i][t] = kDailyScale * r[i];
    }

    auto dates = weekday_dates(config.year, m + 1);
    std::vector<PriceSeries> series;
    series.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        series.push_back(price_path(meta_of[i]->ticker, config.year, dates, returns[i]));
    return series;
}

std::vector<TraderActivity> generate_trader_activity(const std::vector<std::string>& tickers,
                                                     const std::vector<double>& centrality,
                                                     const SynthConfig& config) {
    validate(config);
    if (tickers.size() != centrality.size())
        throw Error("tickers and centrality values must align");
    const std::size_t n = tickers.size();
    Rng rng(stream_seed(config.seed, "traders", config.year));

    // Noise scales with the spread of the base values, not one rank step, so
    // moderate settings genuinely reshuffle ranks instead of leaving the
    // ordering deterministic.
    auto cranks = dense_ranks(centrality);
    std::size_t c_classes = 0;
    for (auto r : cranks) c_classes = std::max(c_classes, r + 1);
    const double mention_spread = 100.0 * double(c_classes);
    std::vector<double> mention_values(n);
    std::vector<TraderActivity> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double base = 100.0 * double(cranks[i] + 1);
        double noisy = base + config.activity_noise * mention_spread * rng.normal();
        long long mentions = std::max(0ll, std::llround(noisy));
        out[i] = {tickers[i], config.year, mentions, 0.0};
        mention_values[i] = double(mentions);
    }
    auto mranks = dense_ranks(mention_values);
    std::size_t m_classes = 0;
    for (auto r : mranks) m_classes = std::max(m_classes, r + 1);
    const double volume_spread = 1000.0 * double(m_classes);
    for (std::size_t i = 0; i < n; ++i) {
        double base = 1000.0 * double(mranks[i] + 1);
        out[i].volume = std::max(0.0, base + config.activity_noise * volume_spread * rng.normal());
    }
    return out;
}

YearDataset generate_dataset(const SynthConfig& config) {
    validate(config);
    return assemble_one(generate_boards(config), config);
}

std::pair<YearDataset, YearDataset> generate_year_pair(const SynthConfig& config,
                                                       double rewire_fraction) {
    validate(config);
    if (!(rewire_fraction >= 0.0 && rewire_fraction <= 1.0))
        throw Error("rewire fraction must lie in [0, 1]");

    Rng rng(stream_seed(config.seed, "boards", config.year));
    DirectorRegistry reg;
    reg.pool_cap = config.director_pool;
    GeneratedBoards first = boards_with(rng, reg, config);

    SynthConfig next = config;
    next.year = config.year + 1;
    GeneratedBoards second = first;
    Rng rewire(stream_seed(config.seed, "rewire", next.year));
    for (auto& board : second.boards) {
        board.year = next.year;
        if (rewire.uniform01() <= rewire_fraction)
            board = make_board(board.corporation, next.year, rewire, reg, next);
    }
    return {assemble_one(first, config), assemble_one(second, next)};
}

void write_csv_bundle(const std::vector<YearDataset>& years, const std::string& dir) {
    std::vector<BoardRecord> boards;
    std::vector<CorporationMeta> metas;
    std::vector<PriceSeries> prices;
    std::vector<TraderActivity> traders;
    std::set<std::string> seen_corps;
    for (const auto& y : years) {
        boards.insert(boards.end(), y.boards.begin(), y.boards.end());
        for (const auto& [corp, meta] : y.meta)
            if (seen_corps.insert(corp).second) metas.push_back(meta);
        for (const auto& [ticker, series] : y.prices) prices.push_back(series);
        for (const auto& [ticker, activity] : y.traders) traders.push_back(activity);
    }
    std::sort(metas.begin(), metas.end(),
              [](const CorporationMeta& a, const CorporationMeta& b) {
                  return a.corporation < b.corporation;
              });

    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) throw Error(std::string("cannot write ") + name + " under " + dir);
        return out;
    };
    auto b = open("boards.csv");
    ingest::write_boards(b, boards);
    auto p = open("prices.csv");
    ingest::write_prices(p, prices);
    auto m = open("meta.csv");
    ingest::write_meta(m, metas);
    auto t = open("traders.csv");
    ingest::write_traders(t, traders);
}

}  // namespace synth
}  // namespace interlock

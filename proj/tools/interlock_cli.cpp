#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "interlock/pipeline.hpp"
#include "interlock/report.hpp"
#include "interlock/synth.hpp"

namespace {

using namespace interlock;

constexpr const char* kVersion = "1.0.0";

std::string timestamp_dir(const char* prefix) {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    localtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
    return std::string(prefix) + "-" + buf;
}

struct InputPaths {
    std::string boards, prices, meta, traders;
};

struct AnalyzeArgs {
    InputPaths in;
    std::string out;
    std::vector<int> years;
    std::string method = "both";
    std::size_t replicates = 1000;
    std::uint64_t seed = 0;
    std::size_t min_sector = 10;
    double max_missing = 0.05;
    std::vector<int> cutoffs;
    std::size_t null_replicates = 0;
    int jobs = int(std::thread::hardware_concurrency());
    bool export_matrices = false;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    return in;
}

std::vector<YearDataset> load_datasets(const InputPaths& paths, Findings* findings) {
    auto boards_in = open_input(paths.boards);
    auto boards = ingest::parse_boards(boards_in, paths.boards, findings);
    auto meta_in = open_input(paths.meta);
    auto metas = ingest::parse_meta(meta_in, paths.meta, findings);
    std::vector<PriceSeries> prices;
    if (!paths.prices.empty()) {
        auto prices_in = open_input(paths.prices);
        prices = ingest::parse_prices(prices_in, paths.prices, findings);
    }
    std::vector<TraderActivity> traders;
    if (!paths.traders.empty()) {
        auto traders_in = open_input(paths.traders);
        traders = ingest::parse_traders(traders_in, paths.traders, findings);
    }
    return ingest::assemble_years(std::move(boards), std::move(metas), std::move(prices),
                                  std::move(traders), findings);
}

std::vector<Method> parse_methods(const std::string& name) {
    if (name == "both") return {Method::pearson, Method::spearman};
    auto m = parse_method(name);
    if (!m) throw Error("unknown method '" + name + "', expected pearson, spearman or both");
    return {*m};
}

int emit_findings(const Findings& findings) {
    int errors = 0;
    for (const auto& f : findings) {
        if (f.severity == Finding::Severity::error) ++errors;
        std::cerr << severity_name(f.severity) << ": " << f.where << ": " << f.message << "\n";
    }
    return errors;
}

void write_run_metadata(const std::string& dir, const AnalyzeArgs& args) {
    nlohmann::ordered_json j;
    j["tool"] = "interlock";
    j["version"] = kVersion;
    nlohmann::ordered_json inputs;
    inputs["boards"] = args.in.boards;
    inputs["prices"] = args.in.prices;
    inputs["meta"] = args.in.meta;
    inputs["traders"] = args.in.traders.empty() ? nlohmann::ordered_json(nullptr)
                                                : nlohmann::ordered_json(args.in.traders);
    j["inputs"] = std::move(inputs);
    j["years"] = args.years.empty() ? nlohmann::ordered_json(nullptr)
                                    : nlohmann::ordered_json(args.years);
    j["method"] = args.method;
    j["replicates"] = args.replicates;
    j["seed"] = args.seed;
    j["min_sector"] = args.min_sector;
    j["max_missing_fraction"] = args.max_missing;
    j["null_replicates"] = args.null_replicates;
    j["cutoffs"] = args.cutoffs;
    j["export_matrices"] = args.export_matrices;

    std::ofstream out(std::filesystem::path(dir) / "run.json", std::ios::binary);
    if (!out) throw Error("cannot write run.json under " + dir);
    out << j.dump(2) << "\n";
}

int cmd_analyze(AnalyzeArgs args) {
    Findings findings;
    try {
        if (args.out.empty()) args.out = timestamp_dir("run");
        auto datasets = load_datasets(args.in, &findings);
        if (!args.years.empty()) {
            std::set<int> wanted(args.years.begin(), args.years.end());
            std::set<int> present;
            for (const auto& ds : datasets) present.insert(ds.year);
            for (int y : wanted)
                if (!present.count(y))
                    findings.push_back({Finding::Severity::error, "inputs",
                                        "requested year " + std::to_string(y) +
                                            " is not present"});
            std::erase_if(datasets,
                          [&](const YearDataset& ds) { return !wanted.count(ds.year); });
        }
        if (datasets.empty())
            findings.push_back({Finding::Severity::error, "inputs", "no years to analyze"});

        PipelineConfig config;
        config.methods = parse_methods(args.method);
        config.replicates = args.replicates;
        config.seed = args.seed;
        config.jobs = std::max(1, args.jobs);
        config.max_missing_fraction = args.max_missing;
        config.min_sector = args.min_sector;
        config.null_replicates = args.null_replicates;
        config.cutoffs = args.cutoffs;

        std::filesystem::create_directories(args.out);
        write_run_metadata(args.out, args);

        std::vector<YearReport> reports;
        std::optional<PreparedYear> previous;
        for (const auto& dataset : datasets) {
            std::optional<PreparedYear> prep;
            try {
                prep = pipeline::prepare_year(dataset, config, &findings);
            } catch (const Error& e) {
                findings.push_back(
                    {Finding::Severity::error, std::to_string(dataset.year), e.what()});
                previous.reset();
                continue;
            }
            const PreparedYear* link =
                previous && previous->year == dataset.year - 1 ? &*previous : nullptr;
            reports.push_back(pipeline::analyze_year(*prep, dataset, link, config, &findings));
            report::write_year_data(args.out, *prep);
            if (args.export_matrices) report::write_matrices(args.out, *prep);
            previous = std::move(prep);
        }
        report::write_reports(args.out, reports);
        std::cout << "wrote " << reports.size() << " year report(s) to " << args.out << "\n";
    } catch (const std::exception& e) {
        findings.push_back({Finding::Severity::error, "analyze", e.what()});
    }
    return emit_findings(findings) ? 1 : 0;
}

struct SynthArgs {
    SynthConfig config;
    std::string out;
    double pair_rewire = -1.0;  // >= 0 adds a rewired second year
};

int cmd_synth(SynthArgs args) {
    try {
        if (args.out.empty()) args.out = timestamp_dir("synth");
        std::vector<YearDataset> years;
        if (args.pair_rewire >= 0.0) {
            auto pair = synth::generate_year_pair(args.config, args.pair_rewire);
            years.push_back(std::move(pair.first));
            years.push_back(std::move(pair.second));
        } else {
            years.push_back(synth::generate_dataset(args.config));
        }
        synth::write_csv_bundle(years, args.out);
        std::cout << "wrote dataset (" << years.size() << " year(s), "
                  << args.config.corporations << " corporations) to " << args.out << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: synth: " << e.what() << "\n";
        return 1;
    }
}

int cmd_validate(const InputPaths& paths) {
    Findings findings;
    try {
        if (!paths.boards.empty() && !paths.meta.empty()) {
            load_datasets(paths, &findings);
        } else {
            if (!paths.boards.empty()) {
                auto in = open_input(paths.boards);
                ingest::parse_boards(in, paths.boards, &findings);
            }
            if (!paths.meta.empty()) {
                auto in = open_input(paths.meta);
                ingest::parse_meta(in, paths.meta, &findings);
            }
            if (!paths.prices.empty()) {
                auto in = open_input(paths.prices);
                ingest::parse_prices(in, paths.prices, &findings);
            }
            if (!paths.traders.empty()) {
                auto in = open_input(paths.traders);
                ingest::parse_traders(in, paths.traders, &findings);
            }
        }
    } catch (const std::exception& e) {
        findings.push_back({Finding::Severity::error, "validate", e.what()});
    }
    int errors = emit_findings(findings);
    std::cout << findings.size() << " issue" << (findings.size() == 1 ? "" : "s") << "\n";
    return errors ? 1 : 0;
}

std::string optional_text(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("n/a");
}

int cmd_network_summary(const InputPaths& paths) {
    Findings findings;
    try {
        auto datasets = load_datasets(paths, &findings);
        for (const auto& dataset : datasets) {
            auto net = graph::build_network(dataset);
            auto distances = graph::all_pairs_distances(net);
            auto summary = graph::network_summary(net, distances, dataset);
            std::cout << "year " << summary.year << "\n"
                      << "  corporations            " << summary.corporations << "\n"
                      << "  links                   " << summary.links << "\n"
                      << "  median_board_size       " << format_double(summary.median_board_size)
                      << "\n"
                      << "  isolated_fraction       " << format_double(summary.isolated_fraction)
                      << "\n"
                      << "  single_director_links   "
                      << optional_text(summary.single_director_link_fraction) << "\n"
                      << "  cross_sector_links      "
                      << optional_text(summary.cross_sector_link_fraction) << "\n"
                      << "  mean_finite_distance    "
                      << optional_text(summary.mean_finite_distance) << "\n"
                      << "  positive_return_share   "
                      << optional_text(summary.positive_return_fraction) << "\n";
        }
    } catch (const std::exception& e) {
        findings.push_back({Finding::Severity::error, "network-summary", e.what()});
    }
    return emit_findings(findings) ? 1 : 0;
}

std::vector<std::pair<std::string, std::string>> read_config_pairs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file " + path);
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw Error(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key(trim(text.substr(0, eq)));
        std::string value(trim(text.substr(eq + 1)));
        while (!key.empty() && key.front() == '-') key.erase(key.begin());
        if (key.empty()) throw Error(path + ":" + std::to_string(lineno) + ": empty key");
        pairs.emplace_back(std::move(key), std::move(value));
    }
    return pairs;
}

// Expands a --config file into ordinary options before the parse; explicit
// flags and environment variables keep precedence over file values.
void merge_config_args(const CLI::App& app, std::vector<std::string>& args) {
    const CLI::App* sub = nullptr;
    std::size_t sub_at = 0;
    for (std::size_t i = 0; i < args.size() && !sub; ++i) {
        if (!args[i].empty() && args[i][0] == '-') continue;
        sub = app.get_subcommand_no_throw(args[i]);
        sub_at = i;
    }
    if (!sub || !sub->get_option_no_throw("--config")) return;

    std::string path;
    for (std::size_t i = sub_at + 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (path.empty()) return;

    for (auto& [key, value] : read_config_pairs(path)) {
        if (key == "config") throw Error(path + ": config files cannot nest");
        const std::string name = "--" + key;
        const CLI::Option* op = sub->get_option_no_throw(name);
        if (!op) throw Error(path + ": unknown config key '" + key + "'");
        bool given = false;
        for (std::size_t i = sub_at + 1; i < args.size() && !given; ++i)
            given = args[i] == name || args[i].rfind(name + "=", 0) == 0;
        if (given) continue;
        std::string env = op->get_envname();
        if (!env.empty() && std::getenv(env.c_str())) continue;
        args.push_back(name + "=" + value);
    }
}

void add_input_options(CLI::App* cmd, InputPaths& paths, bool require_core,
                       bool require_prices) {
    auto* boards = cmd->add_option("--boards", paths.boards, "Board membership CSV")
                       ->envname("INTERLOCK_BOARDS");
    auto* meta = cmd->add_option("--meta", paths.meta, "Corporation metadata CSV")
                     ->envname("INTERLOCK_META");
    auto* prices = cmd->add_option("--prices", paths.prices, "Daily close CSV")
                       ->envname("INTERLOCK_PRICES");
    cmd->add_option("--traders", paths.traders, "Trader activity CSV")
        ->envname("INTERLOCK_TRADERS");
    if (require_core) {
        boards->required();
        meta->required();
    }
    if (require_prices) prices->required();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Board-interlock network and market-correlation analytics"};
    app.require_subcommand(1);

    auto* analyze = app.add_subcommand("analyze", "Run the yearly analysis pipeline");
    AnalyzeArgs aa;
    add_input_options(analyze, aa.in, true, true);
    analyze->add_option("--out", aa.out, "Output directory (default: run-<timestamp>)")
        ->envname("INTERLOCK_OUT");
    analyze->add_option("--years", aa.years, "Years to analyze (default: all)")
        ->delimiter(',')
        ->envname("INTERLOCK_YEARS");
    analyze->add_option("--method", aa.method, "pearson, spearman or both")
        ->envname("INTERLOCK_METHOD");
    analyze->add_option("--replicates", aa.replicates, "Bootstrap replicates (0 skips CIs)")
        ->envname("INTERLOCK_REPLICATES");
    analyze->add_option("--seed", aa.seed, "Master random seed")->envname("INTERLOCK_SEED");
    analyze->add_option("--min-sector", aa.min_sector, "Minimum sector size")
        ->envname("INTERLOCK_MIN_SECTOR");
    analyze->add_option("--max-missing", aa.max_missing, "Missing-day exclusion threshold")
        ->envname("INTERLOCK_MAX_MISSING");
    analyze->add_option("--cutoffs", aa.cutoffs, "Distance cutoffs for the robustness rerun")
        ->delimiter(',')
        ->envname("INTERLOCK_CUTOFFS");
    analyze
        ->add_option("--null-replicates", aa.null_replicates,
                     "Element-resampling null replicates (0 skips)")
        ->envname("INTERLOCK_NULL_REPLICATES");
    analyze->add_option("--jobs", aa.jobs, "Worker threads")->envname("INTERLOCK_JOBS");
    analyze->add_flag("--export-matrices", aa.export_matrices, "Write dense matrix CSVs")
        ->envname("INTERLOCK_EXPORT_MATRICES");
    std::string analyze_config;
    analyze->add_option("--config", analyze_config, "Config file (key=value)");

    auto* synth_cmd = app.add_subcommand("synth", "Generate a planted-structure dataset");
    SynthArgs sa;
    synth_cmd->add_option("--out", sa.out, "Output directory (default: synth-<timestamp>)")
        ->envname("INTERLOCK_OUT");
    synth_cmd->add_option("--corporations", sa.config.corporations, "Corporation count");
    synth_cmd->add_option("--directors", sa.config.director_pool,
                          "Director pool cap (0 = unbounded)");
    synth_cmd->add_option("--board-min", sa.config.board_min, "Smallest board");
    synth_cmd->add_option("--board-max", sa.config.board_max, "Largest board");
    synth_cmd->add_option("--interlock", sa.config.interlock_probability,
                          "Seat-sharing probability");
    synth_cmd->add_option("--sectors", sa.config.sector_count, "Sector count (1-7)");
    synth_cmd->add_option("--coupling-a", sa.config.network_coupling, "Network coupling");
    synth_cmd->add_option("--coupling-b", sa.config.sector_coupling, "Sector coupling");
    synth_cmd->add_option("--coupling-c", sa.config.idiosyncratic, "Idiosyncratic variance");
    synth_cmd->add_option("--days", sa.config.trading_days, "Trading days");
    synth_cmd->add_option("--year", sa.config.year, "Dataset year");
    synth_cmd->add_option("--expert-prob", sa.config.expert_probability,
                          "Financial-expert probability");
    synth_cmd->add_option("--activity-noise", sa.config.activity_noise,
                          "Trader activity noise");
    synth_cmd->add_option("--seed", sa.config.seed, "Generator seed")->envname("INTERLOCK_SEED");
    synth_cmd->add_option("--pair-rewire", sa.pair_rewire,
                          "Also emit a second year with this board-rewire fraction");
    std::string synth_config;
    synth_cmd->add_option("--config", synth_config, "Config file (key=value)");

    auto* validate = app.add_subcommand("validate", "Check input files without analyzing");
    InputPaths vp;
    add_input_options(validate, vp, false, false);

    auto* netsum = app.add_subcommand("network-summary", "Print per-year network statistics");
    InputPaths np;
    add_input_options(netsum, np, true, false);

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        merge_config_args(app, args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (*analyze) return cmd_analyze(std::move(aa));
    if (*synth_cmd) return cmd_synth(std::move(sa));
    if (*validate) return cmd_validate(vp);
    if (*netsum) return cmd_network_summary(np);
    return 1;
}

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

#ifndef INTERLOCK_CLI_PATH
#error "INTERLOCK_CLI_PATH must point at the built binary"
#endif

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cli_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& sub = "") const {
        return sub.empty() ? path.string() : (path / sub).string();
    }
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args, const TempDir& dir) {
    auto out_path = dir.path / "cli_stdout.txt";
    auto err_path = dir.path / "cli_stderr.txt";
    std::string cmd = std::string(INTERLOCK_CLI_PATH) + " " + args + " > " + out_path.string() +
                      " 2> " + err_path.string();
    int status = std::system(cmd.c_str());
    RunResult r;
    if (status >= 0 && WIFEXITED(status)) r.code = WEXITSTATUS(status);
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

// one shared synthetic bundle keeps the suite fast
const TempDir& bundle() {
    static TempDir dir;
    static bool made = false;
    if (!made) {
        TempDir scratch;
        auto r = run_cli("synth --corporations 30 --interlock 0.25 --coupling-a 1.0 --seed 77 --out " +
                             dir.str("data"),
                         scratch);
        REQUIRE(r.code == 0);
        made = true;
    }
    return dir;
}

std::string data_args() {
    const auto& b = bundle();
    return "--boards " + b.str("data/boards.csv") + " --prices " + b.str("data/prices.csv") +
           " --meta " + b.str("data/meta.csv") + " --traders " + b.str("data/traders.csv");
}

}  // namespace

TEST_CASE("synth writes a four file bundle") {
    TempDir tmp;
    auto r = run_cli("synth --corporations 20 --seed 5 --out " + tmp.str("synth"), tmp);
    CHECK(r.code == 0);
    CHECK(r.out.find("20 corporations") != std::string::npos);
    for (const char* name : {"boards.csv", "prices.csv", "meta.csv", "traders.csv"})
        CHECK(fs::exists(tmp.path / "synth" / name));
    auto boards = slurp(tmp.path / "synth" / "boards.csv");
    CHECK(boards.rfind("year,corp_id,director_id,is_financial_expert", 0) == 0);
}

TEST_CASE("synth can emit a rewired year pair") {
    TempDir tmp;
    auto r = run_cli("synth --corporations 20 --seed 6 --pair-rewire 0.4 --out " + tmp.str("pair"),
                     tmp);
    CHECK(r.code == 0);
    auto boards = slurp(tmp.path / "pair" / "boards.csv");
    CHECK(boards.find("2020") != std::string::npos);
    CHECK(boards.find("2021") != std::string::npos);
}

TEST_CASE("analyze produces the full report set") {
    TempDir tmp;
    auto r = run_cli("analyze " + data_args() + " --replicates 120 --seed 3 --out " +
                         tmp.str("run"),
                     tmp);
    CHECK(r.code == 0);
    CHECK(r.out.find("wrote 1 year report(s)") != std::string::npos);
    for (const char* name : {"run.json", "report_2020.json", "summary.json",
                             "mantel_by_sector.csv", "performance_effects.csv", "trader_corr.csv",
                             "performance_2020.csv", "edges_2020.csv"})
        CHECK(fs::exists(tmp.path / "run" / name));

    auto meta = json::parse(slurp(tmp.path / "run" / "run.json"));
    CHECK(meta["tool"] == "interlock");
    CHECK(meta["seed"] == 3);
    CHECK(meta["replicates"] == 120);
    CHECK(!meta.contains("jobs"));
}

TEST_CASE("matrix export is opt in") {
    TempDir tmp;
    auto r = run_cli("analyze " + data_args() +
                         " --replicates 120 --seed 3 --export-matrices --out " + tmp.str("run"),
                     tmp);
    CHECK(r.code == 0);
    for (const char* name : {"distances_2020.csv", "proximity_2020.csv", "similarity_2020.csv"})
        CHECK(fs::exists(tmp.path / "run" / name));
}

TEST_CASE("identical seeds give identical bytes across runs and job counts") {
    TempDir tmp;
    auto a = run_cli("analyze " + data_args() + " --replicates 120 --seed 8 --jobs 1 --out " +
                         tmp.str("a"),
                     tmp);
    auto b = run_cli("analyze " + data_args() + " --replicates 120 --seed 8 --jobs 4 --out " +
                         tmp.str("b"),
                     tmp);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    std::size_t checked = 0;
    for (const auto& entry : fs::directory_iterator(tmp.path / "a")) {
        auto other = tmp.path / "b" / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(slurp(entry.path()) == slurp(other));
        ++checked;
    }
    CHECK(checked >= 8);
}

TEST_CASE("requesting an absent year fails with a finding") {
    TempDir tmp;
    auto r = run_cli("analyze " + data_args() + " --replicates 120 --years 1999 --out " +
                         tmp.str("run"),
                     tmp);
    CHECK(r.code == 1);
    CHECK(r.err.find("1999") != std::string::npos);
    CHECK(r.err.find("not present") != std::string::npos);
}

TEST_CASE("a missing input path is reported") {
    TempDir tmp;
    auto r = run_cli("analyze --boards /nonexistent/boards.csv --prices " +
                         bundle().str("data/prices.csv") + " --meta " +
                         bundle().str("data/meta.csv") + " --out " + tmp.str("run"),
                     tmp);
    CHECK(r.code != 0);
}

TEST_CASE("validate passes a clean bundle") {
    TempDir tmp;
    auto r = run_cli("validate " + data_args(), tmp);
    CHECK(r.code == 0);
    CHECK(r.out.find("0 issues") != std::string::npos);
}

TEST_CASE("validate flags a negative close with its location") {
    TempDir tmp;
    std::ofstream prices(tmp.path / "prices.csv", std::ios::binary);
    prices << "ticker,date,close\nT1,2020-01-06,-5.0\n";
    prices.close();
    auto r = run_cli("validate --prices " + tmp.str("prices.csv"), tmp);
    CHECK(r.code == 1);
    CHECK(r.err.find("prices.csv") != std::string::npos);
    CHECK(r.err.find("error") != std::string::npos);
    CHECK(r.out.find("1 issue") != std::string::npos);
}

TEST_CASE("validate warns about an orphan price series") {
    TempDir tmp;
    std::ofstream extra(tmp.path / "prices.csv", std::ios::binary);
    extra << slurp(bundle().path / "data" / "prices.csv");
    extra << "ZZZZ,2020-01-06,10\nZZZZ,2020-01-07,11\n";
    extra.close();
    auto r = run_cli("validate --boards " + bundle().str("data/boards.csv") + " --meta " +
                         bundle().str("data/meta.csv") + " --prices " + tmp.str("prices.csv"),
                     tmp);
    CHECK(r.code == 0);
    CHECK(r.err.find("warning") != std::string::npos);
    CHECK(r.err.find("ZZZZ") != std::string::npos);
    CHECK(r.out.find("0 issues") == std::string::npos);
}

TEST_CASE("network summary prints the yearly block") {
    TempDir tmp;
    auto r = run_cli("network-summary --boards " + bundle().str("data/boards.csv") + " --meta " +
                         bundle().str("data/meta.csv"),
                     tmp);
    CHECK(r.code == 0);
    CHECK(r.out.find("2020") != std::string::npos);
    CHECK(r.out.find("corporations") != std::string::npos);
    CHECK(r.out.find("links") != std::string::npos);
}

TEST_CASE("config files feed options and flags still win") {
    TempDir tmp;
    std::ofstream cfg(tmp.path / "run.cfg", std::ios::binary);
    cfg << "replicates=140\nseed=12\n";
    cfg.close();

    auto from_cfg = run_cli("analyze " + data_args() + " --config " + tmp.str("run.cfg") +
                                " --out " + tmp.str("cfg_run"),
                            tmp);
    REQUIRE(from_cfg.code == 0);
    auto meta = json::parse(slurp(tmp.path / "cfg_run" / "run.json"));
    CHECK(meta["replicates"] == 140);
    CHECK(meta["seed"] == 12);

    auto with_flag = run_cli("analyze " + data_args() + " --config " + tmp.str("run.cfg") +
                                 " --replicates 160 --out " + tmp.str("flag_run"),
                             tmp);
    REQUIRE(with_flag.code == 0);
    auto meta2 = json::parse(slurp(tmp.path / "flag_run" / "run.json"));
    CHECK(meta2["replicates"] == 160);
    CHECK(meta2["seed"] == 12);
}

TEST_CASE("environment variables supply defaults") {
    TempDir tmp;
    setenv("INTERLOCK_SEED", "55", 1);
    auto r = run_cli("analyze " + data_args() + " --replicates 120 --out " + tmp.str("env_run"),
                     tmp);
    unsetenv("INTERLOCK_SEED");
    REQUIRE(r.code == 0);
    auto meta = json::parse(slurp(tmp.path / "env_run" / "run.json"));
    CHECK(meta["seed"] == 55);
}

TEST_CASE("year restriction keeps only the requested year") {
    TempDir tmp;
    auto r = run_cli("synth --corporations 20 --seed 13 --pair-rewire 0.4 --out " +
                         tmp.str("pair"),
                     tmp);
    REQUIRE(r.code == 0);
    auto a = run_cli("analyze --boards " + tmp.str("pair/boards.csv") + " --prices " +
                         tmp.str("pair/prices.csv") + " --meta " + tmp.str("pair/meta.csv") +
                         " --replicates 120 --years 2021 --out " + tmp.str("only21"),
                     tmp);
    CHECK(a.code == 0);
    CHECK(fs::exists(tmp.path / "only21" / "report_2021.json"));
    CHECK_FALSE(fs::exists(tmp.path / "only21" / "report_2020.json"));
    // the lone year has no predecessor, so no delta appears
    auto parsed = json::parse(slurp(tmp.path / "only21" / "report_2021.json"));
    CHECK(parsed["delta"].empty());
}

TEST_CASE("replicate floor is enforced") {
    TempDir tmp;
    auto r = run_cli("analyze " + data_args() + " --replicates 50 --out " + tmp.str("run"), tmp);
    CHECK(r.code != 0);
}

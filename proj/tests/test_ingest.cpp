#include <sstream>

#include "doctest.h"
#include "interlock/ingest.hpp"

using namespace interlock;

namespace {

std::vector<BoardRecord> boards_from(const std::string& text, Findings* audit = nullptr) {
    std::istringstream in(text);
    return ingest::parse_boards(in, "boards.csv", audit);
}

std::vector<PriceSeries> prices_from(const std::string& text, Findings* audit = nullptr) {
    std::istringstream in(text);
    return ingest::parse_prices(in, "prices.csv", audit);
}

std::vector<CorporationMeta> meta_from(const std::string& text, Findings* audit = nullptr) {
    std::istringstream in(text);
    return ingest::parse_meta(in, "meta.csv", audit);
}

std::vector<TraderActivity> traders_from(const std::string& text, Findings* audit = nullptr) {
    std::istringstream in(text);
    return ingest::parse_traders(in, "traders.csv", audit);
}

constexpr const char* kBoardsHeader = "year,corp_id,director_id,is_financial_expert\n";

}  // namespace

TEST_CASE("expert flag reconciles across corporations") {
    auto boards = boards_from(std::string(kBoardsHeader) +
                              "2007,C1,D1,0\n"
                              "2007,C2,D1,1\n"
                              "2007,C1,D2,0\n");
    REQUIRE(boards.size() == 2);
    const auto& c1 = boards[0];
    CHECK(c1.corporation == "C1");
    REQUIRE(c1.directors.size() == 2);
    CHECK(c1.directors[0] == "D1");
    CHECK(c1.expert_flags[0] == true);  // expert in C2 makes D1 expert everywhere
    CHECK(c1.expert_flags[1] == false);
    CHECK(boards[1].expert_flags[0] == true);
}

TEST_CASE("empty boards file parses to empty sequence") {
    CHECK(boards_from(std::string(kBoardsHeader)).empty());
}

TEST_CASE("three rows group into one board") {
    auto boards = boards_from(std::string(kBoardsHeader) +
                              "2007,C1,D3,0\n"
                              "2007,C1,D1,0\n"
                              "2007,C1,D2,1\n");
    REQUIRE(boards.size() == 1);
    CHECK(boards[0].board_size() == 3);
    CHECK(boards[0].directors == std::vector<std::string>{"D1", "D2", "D3"});
    CHECK(boards[0].expert_fraction() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("duplicate director row is an error naming the line") {
    std::string text = std::string(kBoardsHeader) +
                       "2007,C1,D1,0\n"
                       "2007,C1,D1,1\n";
    CHECK_THROWS_AS(boards_from(text), ParseError);
    Findings audit;
    auto boards = boards_from(text, &audit);
    REQUIRE(audit.size() == 1);
    CHECK(audit[0].severity == Finding::Severity::error);
    CHECK(audit[0].where.find("boards.csv:3") != std::string::npos);
    REQUIRE(boards.size() == 1);
    CHECK(boards[0].board_size() == 1);
}

TEST_CASE("expert reconciliation is order independent") {
    std::string a = std::string(kBoardsHeader) + "2007,C1,D1,0\n2007,C2,D1,1\n";
    std::string b = std::string(kBoardsHeader) + "2007,C2,D1,1\n2007,C1,D1,0\n";
    auto ba = boards_from(a);
    auto bb = boards_from(b);
    REQUIRE(ba.size() == bb.size());
    for (std::size_t i = 0; i < ba.size(); ++i) {
        CHECK(ba[i].corporation == bb[i].corporation);
        CHECK(ba[i].directors == bb[i].directors);
        CHECK(ba[i].expert_flags == bb[i].expert_flags);
    }
}

TEST_CASE("malformed board rows name their line") {
    Findings audit;
    boards_from(std::string(kBoardsHeader) + "2007,C1,D1,2\n", &audit);
    REQUIRE(!audit.empty());
    CHECK(audit[0].where.find(":2") != std::string::npos);
    audit.clear();
    boards_from(std::string(kBoardsHeader) + "notayear,C1,D1,0\n", &audit);
    CHECK(!audit.empty());
}

TEST_CASE("duplicate price rows keep the last write with a warning") {
    Findings audit;
    auto series = prices_from(
        "ticker,date,close\n"
        "AAA,2007-01-03,100\n"
        "AAA,2007-01-03,101\n",
        &audit);
    REQUIRE(series.size() == 1);
    REQUIRE(series[0].observations.size() == 1);
    CHECK(series[0].observations[0].close == 101.0);
    REQUIRE(audit.size() == 1);
    CHECK(audit[0].severity == Finding::Severity::warning);
}

TEST_CASE("price series sorts by date") {
    auto series = prices_from(
        "ticker,date,close\n"
        "AAA,2007-01-04,101\n"
        "AAA,2007-01-03,100\n");
    REQUIRE(series.size() == 1);
    REQUIRE(series[0].observations.size() == 2);
    CHECK(series[0].observations[0].date == Date{2007, 1, 3});
    CHECK(series[0].observations[1].date == Date{2007, 1, 4});
    CHECK(series[0].year == 2007);
}

TEST_CASE("non-positive price is an error naming ticker and date") {
    std::string text =
        "ticker,date,close\n"
        "AAA,2007-01-03,-5\n";
    CHECK_THROWS_WITH_AS(prices_from(text), doctest::Contains("AAA"), ParseError);
    Findings audit;
    auto series = prices_from(text, &audit);
    CHECK(series.empty());
    REQUIRE(audit.size() == 1);
    CHECK(audit[0].message.find("2007-01-03") != std::string::npos);
}

TEST_CASE("unparseable date is an error") {
    Findings audit;
    prices_from("ticker,date,close\nAAA,2007-13-40,10\n", &audit);
    REQUIRE(!audit.empty());
    CHECK(audit[0].severity == Finding::Severity::error);
}

TEST_CASE("price rows split by year") {
    auto series = prices_from(
        "ticker,date,close\n"
        "AAA,2007-12-31,100\n"
        "AAA,2008-01-02,101\n");
    REQUIRE(series.size() == 2);
    CHECK(series[0].year == 2007);
    CHECK(series[1].year == 2008);
}

TEST_CASE("meta parses optional coordinates") {
    auto metas = meta_from(
        "corp_id,ticker,sector,latitude,longitude\n"
        "C1,AAA,Technology,37.77,-122.42\n"
        "C2,BBB,financial,,\n");
    REQUIRE(metas.size() == 2);
    CHECK(metas[0].has_coordinates());
    CHECK(metas[0].latitude == doctest::Approx(37.77));
    CHECK(metas[0].sector == "technology");
    CHECK_FALSE(metas[1].has_coordinates());
    CHECK(metas[1].sector == "financial");
}

TEST_CASE("meta rejects out of range coordinates and duplicate tickers") {
    Findings audit;
    meta_from(
        "corp_id,ticker,sector,latitude,longitude\n"
        "C1,AAA,technology,95,-122\n",
        &audit);
    REQUIRE(!audit.empty());
    CHECK(audit[0].severity == Finding::Severity::error);
}

TEST_CASE("unknown sector canonicalizes to other") {
    CHECK(ingest::canonical_sector("Technology") == "technology");
    CHECK(ingest::canonical_sector("  HEALTHCARE ") == "healthcare");
    CHECK(ingest::canonical_sector("frobnication") == "other");
    CHECK(ingest::canonical_sector("other") == "other");
    CHECK(ingest::kNamedSectors.size() == 7);
}

TEST_CASE("traders parse and validate") {
    auto rows = traders_from(
        "ticker,year,mentions,volume\n"
        "AAA,2007,120,1.5\n");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mentions == 120);
    CHECK(rows[0].volume == 1.5);
    Findings audit;
    traders_from("ticker,year,mentions,volume\nAAA,2007,-1,1\n", &audit);
    CHECK(!audit.empty());
    audit.clear();
    traders_from("ticker,year,mentions,volume\nAAA,2007,1,-0.5\n", &audit);
    CHECK(!audit.empty());
}

TEST_CASE("trading calendar is the sorted date union") {
    auto series = prices_from(
        "ticker,date,close\n"
        "AAA,2007-01-03,100\n"
        "AAA,2007-01-05,101\n"
        "BBB,2007-01-04,50\n"
        "BBB,2007-01-05,51\n");
    std::vector<const PriceSeries*> ptrs;
    for (const auto& s : series) ptrs.push_back(&s);
    auto calendar = ingest::trading_calendar(ptrs);
    REQUIRE(calendar.size() == 3);
    CHECK(calendar[0] == Date{2007, 1, 3});
    CHECK(calendar[1] == Date{2007, 1, 4});
    CHECK(calendar[2] == Date{2007, 1, 5});
}

TEST_CASE("completeness filter keeps small gaps and fills them") {
    std::vector<Date> calendar;
    Date d{2007, 1, 1};
    while (int(calendar.size()) < 252) {
        if (d.weekday() < 5) calendar.push_back(d);
        d = d.next_day();
    }
    PriceSeries s;
    s.ticker = "AAA";
    s.year = 2007;
    for (int i = 0; i < 252; ++i) {
        if (i == 100 || i == 200) continue;  // two missing days
        s.observations.push_back({calendar[i], 100.0 + i});
    }
    auto result = ingest::apply_completeness_filter(s, calendar, 0.05);
    REQUIRE(result.series.has_value());
    CHECK(result.carried_days == 2);
    CHECK(result.missing_fraction == doctest::Approx(2.0 / 252.0));
    REQUIRE(result.series->observations.size() == 252);
    // a carried day repeats the previous close, so its log return is zero
    CHECK(result.series->observations[100].close == result.series->observations[99].close);
}

TEST_CASE("completeness filter excludes sparse series") {
    std::vector<Date> calendar;
    Date d{2007, 1, 1};
    while (int(calendar.size()) < 252) {
        if (d.weekday() < 5) calendar.push_back(d);
        d = d.next_day();
    }
    PriceSeries s;
    s.ticker = "AAA";
    s.year = 2007;
    for (int i = 0; i < 200; ++i) s.observations.push_back({calendar[i], 100.0});
    auto result = ingest::apply_completeness_filter(s, calendar, 0.05);
    CHECK_FALSE(result.series.has_value());
    CHECK(result.missing_fraction == doctest::Approx(52.0 / 252.0));
}

TEST_CASE("assemble groups by year and attaches by ticker") {
    auto boards = boards_from(std::string(kBoardsHeader) +
                              "2007,C1,D1,0\n"
                              "2007,C2,D1,0\n"
                              "2008,C1,D1,0\n");
    auto metas = meta_from(
        "corp_id,ticker,sector,latitude,longitude\n"
        "C1,AAA,technology,,\n"
        "C2,BBB,financial,,\n");
    auto prices = prices_from(
        "ticker,date,close\n"
        "AAA,2007-01-03,100\n"
        "BBB,2007-01-03,50\n"
        "AAA,2008-01-03,110\n");
    auto traders = traders_from("ticker,year,mentions,volume\nAAA,2007,10,1\n");
    auto years = ingest::assemble_years(boards, metas, prices, traders);
    REQUIRE(years.size() == 2);
    CHECK(years[0].year == 2007);
    CHECK(years[0].boards.size() == 2);
    CHECK(years[0].prices.count("AAA") == 1);
    CHECK(years[0].prices.count("BBB") == 1);
    CHECK(years[0].traders.count("AAA") == 1);
    CHECK(years[1].year == 2008);
    CHECK(years[1].boards.size() == 1);
    CHECK(years[1].prices.count("BBB") == 0);
    REQUIRE(years[0].board_for("C1") != nullptr);
    CHECK(years[0].board_for("C1")->board_size() == 1);
    CHECK(years[0].board_for("missing") == nullptr);
}

TEST_CASE("board corporation without metadata is an error") {
    auto boards = boards_from(std::string(kBoardsHeader) + "2007,C1,D1,0\n");
    CHECK_THROWS_AS(
        ingest::assemble_years(boards, {}, {}, {}),
        Error);
    Findings audit;
    auto years = ingest::assemble_years(boards, {}, {}, {}, &audit);
    CHECK(!audit.empty());
}

TEST_CASE("round trip through writers preserves the dataset") {
    auto boards = boards_from(std::string(kBoardsHeader) +
                              "2007,C1,D1,1\n"
                              "2007,C1,D2,0\n"
                              "2007,C2,D1,1\n");
    auto metas = meta_from(
        "corp_id,ticker,sector,latitude,longitude\n"
        "C1,AAA,technology,37.5,-100.25\n"
        "C2,BBB,other,,\n");
    auto prices = prices_from(
        "ticker,date,close\n"
        "AAA,2007-01-03,100.5\n"
        "AAA,2007-01-04,101.25\n"
        "BBB,2007-01-03,50\n");
    auto traders = traders_from("ticker,year,mentions,volume\nAAA,2007,10,1.25\n");
    auto years = ingest::assemble_years(boards, metas, prices, traders);
    REQUIRE(years.size() == 1);

    std::ostringstream bo, po, mo, to;
    ingest::write_boards(bo, boards);
    ingest::write_prices(po, prices);
    ingest::write_meta(mo, metas);
    ingest::write_traders(to, traders);

    auto years2 = ingest::assemble_years(boards_from(bo.str()), meta_from(mo.str()),
                                         prices_from(po.str()), traders_from(to.str()));
    REQUIRE(years2.size() == 1);
    CHECK(ingest::dataset_equal(years[0], years2[0]));
}

TEST_CASE("parse is deterministic") {
    std::string text = std::string(kBoardsHeader) +
                       "2007,C2,D9,1\n"
                       "2007,C1,D3,0\n"
                       "2007,C1,D1,1\n";
    auto a = boards_from(text);
    auto b = boards_from(text);
    REQUIRE(a.size() == b.size());
    std::ostringstream wa, wb;
    ingest::write_boards(wa, a);
    ingest::write_boards(wb, b);
    CHECK(wa.str() == wb.str());
}

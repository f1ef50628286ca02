#include "interlock/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "interlock/csv.hpp"

namespace interlock {

const BoardRecord* YearDataset::board_for(const std::string& corp) const {
    auto it = std::lower_bound(boards.begin(), boards.end(), corp,
                               [](const BoardRecord& b, const std::string& c) { return b.corporation < c; });
    if (it == boards.end() || it->corporation != corp) return nullptr;
    return &*it;
}

namespace ingest {

namespace {

// With no audit sink an error throws; with one it is recorded and the caller
// skips the offending row. Warnings are recorded only when a sink exists.
void report(Findings* audit, Finding::Severity sev, const std::string& where,
            const std::string& message) {
    if (!audit) {
        if (sev == Finding::Severity::error) throw ParseError(where + ": " + message);
        return;
    }
    audit->push_back({sev, where, message});
}

bool expect_header(CsvReader& reader, const std::string& expected, Findings* audit) {
    std::vector<std::string> fields;
    if (!reader.next_row(fields)) {
        report(audit, Finding::Severity::error, reader.source(), "missing header row");
        return false;
    }
    if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
    std::string joined;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) joined += ',';
        joined += trim(fields[i]);
    }
    if (joined != expected) {
        report(audit, Finding::Severity::error, reader.location(),
               "expected header '" + expected + "', got '" + joined + "'");
        return false;
    }
    return true;
}

bool check_field_count(CsvReader& reader, const std::vector<std::string>& fields,
                       std::size_t expected, Findings* audit) {
    if (fields.size() == expected) return true;
    report(audit, Finding::Severity::error, reader.location(),
           "expected " + std::to_string(expected) + " fields, got " + std::to_string(fields.size()));
    return false;
}

}  // namespace

const std::vector<std::string> kNamedSectors = {
    "basic_materials", "consumer_goods", "financial", "healthcare",
    "industrial",      "services",       "technology",
};

std::string canonical_sector(std::string_view raw) {
    std::string s{trim(raw)};
    for (char& c : s)
        c = char(std::tolower(static_cast<unsigned char>(c)));
    if (s == "other") return s;
    for (const auto& name : kNamedSectors)
        if (s == name) return s;
    return "other";
}

std::vector<BoardRecord> parse_boards(std::istream& in, const std::string& source_name,
                                      Findings* audit) {
    CsvReader reader(in, source_name);
    if (!expect_header(reader, "year,corp_id,director_id,is_financial_expert", audit)) return {};

    // (year, corporation) -> director -> expert flag as written on that row
    std::map<std::pair<int, std::string>, std::map<std::string, bool>> grouped;
    // year -> director -> reconciled flag (true if expert on any row that year)
    std::map<int, std::map<std::string, bool>> year_experts;

    std::vector<std::string> fields;
    while (reader.next_row(fields)) {
        if (!check_field_count(reader, fields, 4, audit)) continue;
        auto year = parse_int(trim(fields[0]));
        if (!year || *year < 1) {
            report(audit, Finding::Severity::error, reader.location(),
                   "bad year '" + fields[0] + "'");
            continue;
        }
        std::string corp{trim(fields[1])};
        std::string director{trim(fields[2])};
        if (corp.empty() || director.empty()) {
            report(audit, Finding::Severity::error, reader.location(),
                   "empty corp_id or director_id");
            continue;
        }
        std::string_view flag = trim(fields[3]);
        if (flag != "0" && flag != "1") {
            report(audit, Finding::Severity::error, reader.location(),
                   "is_financial_expert must be 0 or 1, got '" + std::string(flag) + "'");
            continue;
        }
        bool expert = flag == "1";
        auto& directors = grouped[{int(*year), corp}];
        if (directors.count(director)) {
            report(audit, Finding::Severity::error, reader.location(),
                   "duplicate director '" + director + "' for corporation '" + corp +
                       "' in year " + std::to_string(*year));
            continue;
        }
        directors[director] = expert;
        auto& reconciled = year_experts[int(*year)][director];
        reconciled = reconciled || expert;
    }

    std::vector<BoardRecord> records;
    records.reserve(grouped.size());
    for (const auto& [key, directors] : grouped) {
        BoardRecord rec;
        rec.year = key.first;
        rec.corporation = key.second;
        const auto& experts = year_experts.at(rec.year);
        for (const auto& [director, flag] : directors) {
            (void)flag;
            rec.directors.push_back(director);
            rec.expert_flags.push_back(experts.at(director));
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<PriceSeries> parse_prices(std::istream& in, const std::string& source_name,
                                      Findings* audit) {
    CsvReader reader(in, source_name);
    if (!expect_header(reader, "ticker,date,close", audit)) return {};

    std::map<std::pair<std::string, int>, std::map<Date, double>> grouped;

    std::vector<std::string> fields;
    while (reader.next_row(fields)) {
        if (!check_field_count(reader, fields, 3, audit)) continue;
        std::string ticker{trim(fields[0])};
        if (ticker.empty()) {
            report(audit, Finding::Severity::error, reader.location(), "empty ticker");
            continue;
        }
        auto date = Date::parse(trim(fields[1]));
        if (!date) {
            report(audit, Finding::Severity::error, reader.location(),
                   "unparseable date '" + fields[1] + "' for ticker '" + ticker + "'");
            continue;
        }
        auto close = parse_double(trim(fields[2]));
        if (!close) {
            report(audit, Finding::Severity::error, reader.location(),
                   "unparseable close '" + fields[2] + "' for ticker '" + ticker + "'");
            continue;
        }
        if (*close <= 0) {
            report(audit, Finding::Severity::error, reader.location(),
                   "non-positive close " + format_double(*close) + " for ticker '" + ticker +
                       "' on " + date->iso());
            continue;
        }
        auto& series = grouped[{ticker, date->year}];
        auto [it, inserted] = series.emplace(*date, *close);
        if (!inserted) {
            report(audit, Finding::Severity::warning, reader.location(),
                   "duplicate observation for ticker '" + ticker + "' on " + date->iso() +
                       ", keeping the last value");
            it->second = *close;
        }
    }

    std::vector<PriceSeries> out;
    out.reserve(grouped.size());
    for (const auto& [key, observations] : grouped) {
        PriceSeries series;
        series.ticker = key.first;
        series.year = key.second;
        series.observations.reserve(observations.size());
        for (const auto& [date, close] : observations) series.observations.push_back({date, close});
        out.push_back(std::move(series));
    }
    return out;
}

std::vector<CorporationMeta> parse_meta(std::istream& in, const std::string& source_name,
                                        Findings* audit) {
    CsvReader reader(in, source_name);
    if (!expect_header(reader, "corp_id,ticker,sector,latitude,longitude", audit)) return {};

    std::vector<CorporationMeta> out;
    std::set<std::string> seen_corps;
    std::set<std::string> seen_tickers;

    std::vector<std::string> fields;
    while (reader.next_row(fields)) {
        if (!check_field_count(reader, fields, 5, audit)) continue;
        CorporationMeta meta;
        meta.corporation = trim(fields[0]);
        meta.ticker = trim(fields[1]);
        if (meta.corporation.empty() || meta.ticker.empty()) {
            report(audit, Finding::Severity::error, reader.location(), "empty corp_id or ticker");
            continue;
        }
        if (!seen_corps.insert(meta.corporation).second) {
            report(audit, Finding::Severity::error, reader.location(),
                   "duplicate corp_id '" + meta.corporation + "'");
            continue;
        }
        if (!seen_tickers.insert(meta.ticker).second) {
            report(audit, Finding::Severity::error, reader.location(),
                   "duplicate ticker '" + meta.ticker + "'");
            continue;
        }
        std::string raw_sector{trim(fields[2])};
        meta.sector = canonical_sector(raw_sector);
        if (meta.sector == "other" && raw_sector != "other") {
            report(audit, Finding::Severity::warning, reader.location(),
                   "unknown sector '" + raw_sector + "' for corporation '" + meta.corporation +
                       "', using 'other'");
        }
        std::string_view lat = trim(fields[3]);
        std::string_view lon = trim(fields[4]);
        if (lat.empty() != lon.empty()) {
            report(audit, Finding::Severity::error, reader.location(),
                   "latitude and longitude must be given together for corporation '" +
                       meta.corporation + "'");
            continue;
        }
        if (!lat.empty()) {
            auto plat = parse_double(lat);
            auto plon = parse_double(lon);
            if (!plat || !plon) {
                report(audit, Finding::Severity::error, reader.location(),
                       "unparseable coordinates for corporation '" + meta.corporation + "'");
                continue;
            }
            if (*plat < -90.0 || *plat > 90.0 || *plon < -180.0 || *plon > 180.0) {
                report(audit, Finding::Severity::error, reader.location(),
                       "coordinates out of range for corporation '" + meta.corporation + "'");
                continue;
            }
            meta.latitude = *plat;
            meta.longitude = *plon;
        }
        out.push_back(std::move(meta));
    }
    std::sort(out.begin(), out.end(),
              [](const CorporationMeta& a, const CorporationMeta& b) {
                  return a.corporation < b.corporation;
              });
    return out;
}

std::vector<TraderActivity> parse_traders(std::istream& in, const std::string& source_name,
                                          Findings* audit) {
    CsvReader reader(in, source_name);
    if (!expect_header(reader, "ticker,year,mentions,volume", audit)) return {};

    std::map<std::pair<std::string, int>, TraderActivity> grouped;

    std::vector<std::string> fields;
    while (reader.next_row(fields)) {
        if (!check_field_count(reader, fields, 4, audit)) continue;
        TraderActivity activity;
        activity.ticker = trim(fields[0]);
        if (activity.ticker.empty()) {
            report(audit, Finding::Severity::error, reader.location(), "empty ticker");
            continue;
        }
        auto year = parse_int(trim(fields[1]));
        if (!year || *year < 1) {
            report(audit, Finding::Severity::error, reader.location(),
                   "bad year '" + fields[1] + "'");
            continue;
        }
        activity.year = int(*year);
        auto mentions = parse_int(trim(fields[2]));
        if (!mentions || *mentions < 0) {
            report(audit, Finding::Severity::error, reader.location(),
                   "mentions must be a non-negative integer, got '" + fields[2] + "'");
            continue;
        }
        activity.mentions = *mentions;
        auto volume = parse_double(trim(fields[3]));
        if (!volume || *volume < 0) {
            report(audit, Finding::Severity::error, reader.location(),
                   "volume must be non-negative, got '" + fields[3] + "'");
            continue;
        }
        activity.volume = *volume;
        auto key = std::make_pair(activity.ticker, activity.year);
        if (grouped.count(key)) {
            report(audit, Finding::Severity::error, reader.location(),
                   "duplicate activity row for ticker '" + activity.ticker + "' in year " +
                       std::to_string(activity.year));
            continue;
        }
        grouped.emplace(std::move(key), std::move(activity));
    }

    std::vector<TraderActivity> out;
    out.reserve(grouped.size());
    for (auto& [key, activity] : grouped) {
        (void)key;
        out.push_back(std::move(activity));
    }
    return out;
}

std::vector<Date> trading_calendar(const std::vector<const PriceSeries*>& series) {
    std::set<Date> dates;
    for (const PriceSeries* s : series)
        for (const auto& obs : s->observations) dates.insert(obs.date);
    return {dates.begin(), dates.end()};
}

CompletenessResult apply_completeness_filter(const PriceSeries& series,
                                             const std::vector<Date>& calendar,
                                             double max_missing_fraction) {
    CompletenessResult result;
    if (calendar.empty() || series.observations.empty()) {
        result.missing_fraction = 1.0;
        return result;
    }
    std::map<Date, double> by_date;
    for (const auto& obs : series.observations) by_date.emplace(obs.date, obs.close);

    std::size_t missing = 0;
    for (const Date& d : calendar)
        if (!by_date.count(d)) ++missing;
    result.missing_fraction = double(missing) / double(calendar.size());
    if (result.missing_fraction > max_missing_fraction) return result;

    PriceSeries filled;
    filled.ticker = series.ticker;
    filled.year = series.year;
    filled.observations.reserve(calendar.size());
    double last = by_date.begin()->second;
    for (const Date& d : calendar) {
        auto it = by_date.find(d);
        if (it != by_date.end()) {
            last = it->second;
        } else {
            ++result.carried_days;
        }
        filled.observations.push_back({d, last});
    }
    result.series = std::move(filled);
    return result;
}

std::vector<YearDataset> assemble_years(std::vector<BoardRecord> boards,
                                        std::vector<CorporationMeta> metas,
                                        std::vector<PriceSeries> prices,
                                        std::vector<TraderActivity> traders,
                                        Findings* audit) {
    std::map<std::string, CorporationMeta> meta_by_corp;
    std::map<std::string, std::string> corp_by_ticker;
    for (auto& meta : metas) {
        corp_by_ticker[meta.ticker] = meta.corporation;
        meta_by_corp.emplace(meta.corporation, std::move(meta));
    }

    std::map<int, YearDataset> years;
    std::map<int, std::set<std::string>> seen_corps;
    for (auto& board : boards) {
        auto mit = meta_by_corp.find(board.corporation);
        if (mit == meta_by_corp.end()) {
            report(audit, Finding::Severity::error, "boards",
                   "no metadata for corporation '" + board.corporation + "' (year " +
                       std::to_string(board.year) + ")");
            continue;
        }
        if (!seen_corps[board.year].insert(board.corporation).second) {
            report(audit, Finding::Severity::error, "boards",
                   "duplicate board record for corporation '" + board.corporation + "' in year " +
                       std::to_string(board.year));
            continue;
        }
        auto& dataset = years[board.year];
        dataset.year = board.year;
        dataset.meta.emplace(board.corporation, mit->second);
        dataset.boards.push_back(std::move(board));
    }

    for (auto& series : prices) {
        auto cit = corp_by_ticker.find(series.ticker);
        auto yit = years.find(series.year);
        bool attached = cit != corp_by_ticker.end() && yit != years.end() &&
                        yit->second.meta.count(cit->second) != 0;
        if (!attached) {
            report(audit, Finding::Severity::warning, "prices",
                   "price series for ticker '" + series.ticker + "' in year " +
                       std::to_string(series.year) + " matches no board, ignored");
            continue;
        }
        yit->second.prices.emplace(series.ticker, std::move(series));
    }

    for (auto& activity : traders) {
        auto cit = corp_by_ticker.find(activity.ticker);
        auto yit = years.find(activity.year);
        bool attached = cit != corp_by_ticker.end() && yit != years.end() &&
                        yit->second.meta.count(cit->second) != 0;
        if (!attached) {
            report(audit, Finding::Severity::warning, "traders",
                   "activity for ticker '" + activity.ticker + "' in year " +
                       std::to_string(activity.year) + " matches no board, ignored");
            continue;
        }
        yit->second.traders.emplace(activity.ticker, std::move(activity));
    }

    std::vector<YearDataset> out;
    out.reserve(years.size());
    for (auto& [year, dataset] : years) {
        (void)year;
        std::sort(dataset.boards.begin(), dataset.boards.end(),
                  [](const BoardRecord& a, const BoardRecord& b) {
                      return a.corporation < b.corporation;
                  });
        out.push_back(std::move(dataset));
    }
    return out;
}

void write_boards(std::ostream& out, const std::vector<BoardRecord>& boards) {
    CsvWriter writer(out);
    writer.write_row({"year", "corp_id", "director_id", "is_financial_expert"});
    for (const auto& board : boards)
        for (std::size_t i = 0; i < board.directors.size(); ++i)
            writer.write_row({std::to_string(board.year), board.corporation, board.directors[i],
                              board.expert_flags[i] ? "1" : "0"});
}

void write_prices(std::ostream& out, const std::vector<PriceSeries>& series) {
    CsvWriter writer(out);
    writer.write_row({"ticker", "date", "close"});
    for (const auto& s : series)
        for (const auto& obs : s.observations)
            writer.write_row({s.ticker, obs.date.iso(), format_double(obs.close)});
}

void write_meta(std::ostream& out, const std::vector<CorporationMeta>& metas) {
    CsvWriter writer(out);
    writer.write_row({"corp_id", "ticker", "sector", "latitude", "longitude"});
    for (const auto& meta : metas)
        writer.write_row({meta.corporation, meta.ticker, meta.sector,
                          meta.latitude ? format_double(*meta.latitude) : "",
                          meta.longitude ? format_double(*meta.longitude) : ""});
}

void write_traders(std::ostream& out, const std::vector<TraderActivity>& traders) {
    CsvWriter writer(out);
    writer.write_row({"ticker", "year", "mentions", "volume"});
    for (const auto& activity : traders)
        writer.write_row({activity.ticker, std::to_string(activity.year),
                          std::to_string(activity.mentions), format_double(activity.volume)});
}

bool dataset_equal(const YearDataset& a, const YearDataset& b) {
    if (a.year != b.year) return false;
    if (a.boards.size() != b.boards.size()) return false;
    for (std::size_t i = 0; i < a.boards.size(); ++i) {
        const auto& x = a.boards[i];
        const auto& y = b.boards[i];
        if (x.year != y.year || x.corporation != y.corporation || x.directors != y.directors ||
            x.expert_flags != y.expert_flags)
            return false;
    }
    if (a.meta.size() != b.meta.size()) return false;
    for (auto ait = a.meta.begin(), bit = b.meta.begin(); ait != a.meta.end(); ++ait, ++bit) {
        if (ait->first != bit->first) return false;
        const auto& x = ait->second;
        const auto& y = bit->second;
        if (x.corporation != y.corporation || x.ticker != y.ticker || x.sector != y.sector ||
            x.latitude != y.latitude || x.longitude != y.longitude)
            return false;
    }
    if (a.prices.size() != b.prices.size()) return false;
    for (auto ait = a.prices.begin(), bit = b.prices.begin(); ait != a.prices.end(); ++ait, ++bit) {
        if (ait->first != bit->first) return false;
        const auto& x = ait->second;
        const auto& y = bit->second;
        if (x.ticker != y.ticker || x.year != y.year ||
            x.observations.size() != y.observations.size())
            return false;
        for (std::size_t i = 0; i < x.observations.size(); ++i)
            if (x.observations[i].date != y.observations[i].date ||
                x.observations[i].close != y.observations[i].close)
                return false;
    }
    if (a.traders.size() != b.traders.size()) return false;
    for (auto ait = a.traders.begin(), bit = b.traders.begin(); ait != a.traders.end();
         ++ait, ++bit) {
        if (ait->first != bit->first) return false;
        const auto& x = ait->second;
        const auto& y = bit->second;
        if (x.ticker != y.ticker || x.year != y.year || x.mentions != y.mentions ||
            x.volume != y.volume)
            return false;
    }
    return true;
}

}  // namespace ingest

}  // namespace interlock

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "interlock/common.hpp"
#include "interlock/date.hpp"

namespace interlock {

// One corporation-year's board. Director identity is the opaque ID column;
// expert flags are reconciled across corporations within the year: a
// director marked expert anywhere that year is an expert everywhere.
struct BoardRecord {
    int year = 0;
    std::string corporation;
    std::vector<std::string> directors;      // sorted, unique
    std::vector<bool> expert_flags;          // parallel to directors

    std::size_t board_size() const { return directors.size(); }

    double expert_fraction() const {
        if (directors.empty()) return 0.0;
        std::size_t n = 0;
        for (bool f : expert_flags) n += f ? 1 : 0;
        return double(n) / double(directors.size());
    }
};

struct CorporationMeta {
    std::string corporation;
    std::string ticker;
    std::string sector;
    std::optional<double> latitude;
    std::optional<double> longitude;

    bool has_coordinates() const { return latitude.has_value() && longitude.has_value(); }
};

struct PriceObservation {
    Date date;
    double close = 0.0;
};

struct PriceSeries {
    std::string ticker;
    int year = 0;
    std::vector<PriceObservation> observations;  // strictly increasing dates
};

struct TraderActivity {
    std::string ticker;
    int year = 0;
    long long mentions = 0;
    double volume = 0.0;
};

// Everything parsed for one calendar year, keyed consistently:
// boards by corporation, prices/traders by ticker.
struct YearDataset {
    int year = 0;
    std::vector<BoardRecord> boards;                     // sorted by corporation
    std::map<std::string, CorporationMeta> meta;         // corporation -> meta
    std::map<std::string, PriceSeries> prices;           // ticker -> series
    std::map<std::string, TraderActivity> traders;       // ticker -> activity

    const BoardRecord* board_for(const std::string& corp) const;
};

namespace ingest {

// The seven named market sectors; anything else canonicalizes to "other".
extern const std::vector<std::string> kNamedSectors;
std::string canonical_sector(std::string_view raw);

// Parsers. With `audit == nullptr` the first schema violation throws
// ParseError naming file and line. With an audit sink, violations are
// recorded as findings, the offending rows skipped, and parsing continues.
std::vector<BoardRecord> parse_boards(std::istream& in, const std::string& source_name,
                                      Findings* audit = nullptr);
std::vector<PriceSeries> parse_prices(std::istream& in, const std::string& source_name,
                                      Findings* audit = nullptr);
std::vector<CorporationMeta> parse_meta(std::istream& in, const std::string& source_name,
                                        Findings* audit = nullptr);
std::vector<TraderActivity> parse_traders(std::istream& in, const std::string& source_name,
                                          Findings* audit = nullptr);

// Canonical trading calendar for one year: the union of all dates observed
// across that year's price series, sorted.
std::vector<Date> trading_calendar(const std::vector<const PriceSeries*>& series);

// Missing-price rule: exclude the series if it misses more than
// `max_missing_fraction` of the calendar; otherwise fill every gap by
// carrying the previous close (the first observed close for leading gaps).
struct CompletenessResult {
    std::optional<PriceSeries> series;  // absent => excluded
    int carried_days = 0;
    double missing_fraction = 0.0;
};
CompletenessResult apply_completeness_filter(const PriceSeries& series,
                                             const std::vector<Date>& calendar,
                                             double max_missing_fraction);

// Groups parsed tables into per-year datasets. Every board corporation must
// have metadata (error otherwise); price series and trader activity attach
// by the metadata ticker. Years are sorted ascending.
std::vector<YearDataset> assemble_years(std::vector<BoardRecord> boards,
                                        std::vector<CorporationMeta> metas,
                                        std::vector<PriceSeries> prices,
                                        std::vector<TraderActivity> traders,
                                        Findings* audit = nullptr);

// Serialization in the exact input formats (used by the synthesizer and the
// round-trip tests).
void write_boards(std::ostream& out, const std::vector<BoardRecord>& boards);
void write_prices(std::ostream& out, const std::vector<PriceSeries>& series);
void write_meta(std::ostream& out, const std::vector<CorporationMeta>& metas);
void write_traders(std::ostream& out, const std::vector<TraderActivity>& traders);

bool dataset_equal(const YearDataset& a, const YearDataset& b);

}  // namespace ingest

}  // namespace interlock

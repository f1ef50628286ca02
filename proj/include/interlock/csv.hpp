#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "interlock/common.hpp"

namespace interlock {

// Line-oriented CSV reader: comma separators, optional RFC-4180 quoting,
// '#'-prefixed comment lines and blank lines skipped. Multi-line quoted
// fields are not supported (none of the toolkit formats need them).
class CsvReader {
public:
    CsvReader(std::istream& in, std::string source_name)
        : in_(in), source_(std::move(source_name)) {}

    // Reads the next data row into `fields`. Returns false at end of input.
    bool next_row(std::vector<std::string>& fields);

    // 1-based line number of the row most recently returned.
    std::size_t line() const { return line_; }

    const std::string& source() const { return source_; }

    std::string location() const { return source_ + ":" + std::to_string(line_); }

private:
    std::istream& in_;
    std::string source_;
    std::size_t line_ = 0;
};

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void write_row(const std::vector<std::string>& fields);

private:
    std::ostream& out_;
};

// Quotes a field only when it contains a separator, quote, or newline.
std::string csv_escape(std::string_view field);

}  // namespace interlock

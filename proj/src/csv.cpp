#include "interlock/csv.hpp"

namespace interlock {

bool CsvReader::next_row(std::vector<std::string>& fields) {
    std::string raw;
    while (std::getline(in_, raw)) {
        ++line_;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string_view sv = raw;
        std::string_view stripped = trim(sv);
        if (stripped.empty() || stripped.front() == '#') continue;

        fields.clear();
        std::string cur;
        bool in_quotes = false;
        for (std::size_t i = 0; i < sv.size(); ++i) {
            char c = sv[i];
            if (in_quotes) {
                if (c == '"') {
                    if (i + 1 < sv.size() && sv[i + 1] == '"') {
                        cur.push_back('"');
                        ++i;
                    } else {
                        in_quotes = false;
                    }
                } else {
                    cur.push_back(c);
                }
            } else if (c == '"') {
                in_quotes = true;
            } else if (c == ',') {
                fields.push_back(std::move(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (in_quotes) {
            throw ParseError(location() + ": unterminated quoted field");
        }
        fields.push_back(std::move(cur));
        return true;
    }
    return false;
}

std::string csv_escape(std::string_view field) {
    bool needs = field.find_first_of(",\"\n") != std::string_view::npos;
    if (!needs) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << csv_escape(fields[i]);
    }
    out_ << '\n';
}

}  // namespace interlock

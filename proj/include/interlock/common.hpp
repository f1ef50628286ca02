#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace interlock {

// Base error type for everything the toolkit can reject: malformed input,
// violated preconditions, degenerate statistics.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public Error {
public:
    using Error::Error;
};

// A single diagnostic emitted by parsers, validators, or the pipeline.
// `where` names the source (file:line, ticker/date, sector, ...).
struct Finding {
    enum class Severity { error, warning, info };
    Severity severity = Severity::info;
    std::string where;
    std::string message;
};

using Findings = std::vector<Finding>;

inline const char* severity_name(Finding::Severity s) {
    switch (s) {
        case Finding::Severity::error: return "error";
        case Finding::Severity::warning: return "warning";
        default: return "info";
    }
}

// Shortest round-trip decimal form, used for every number we print so that
// repeated runs produce byte-identical files.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
    double v = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) return std::nullopt;
    return v;
}

inline std::optional<long long> parse_int(std::string_view s) {
    long long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

// FNV-1a, used to derive per-analysis RNG streams from stable content
// (node identifiers), never from memory addresses or iteration order.
inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 14695981039346656037ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace interlock

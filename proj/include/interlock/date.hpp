#pragma once

#include <compare>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "interlock/common.hpp"

namespace interlock {

// Calendar date, ISO-8601 in files. No time zones, no arithmetic beyond
// ordering; trading calendars are explicit date lists.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    std::string iso() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
        return buf;
    }

    static bool is_leap(int y) {
        return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    }

    static int days_in_month(int y, int m) {
        static const int d[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        if (m == 2 && is_leap(y)) return 29;
        return d[m - 1];
    }

    bool valid() const {
        return year >= 1 && month >= 1 && month <= 12 && day >= 1 && day <= days_in_month(year, month);
    }

    // 0 = Monday ... 6 = Sunday (proleptic Gregorian).
    int weekday() const {
        int y = year, m = month;
        if (m < 3) { m += 12; --y; }
        int k = y % 100, j = y / 100;
        int h = (day + 13 * (m + 1) / 5 + k + k / 4 + j / 4 + 5 * j) % 7;  // Zeller, 0=Sat
        return (h + 5) % 7;
    }

    Date next_day() const {
        Date d = *this;
        if (++d.day > days_in_month(d.year, d.month)) {
            d.day = 1;
            if (++d.month > 12) { d.month = 1; ++d.year; }
        }
        return d;
    }

    static std::optional<Date> parse(std::string_view s) {
        if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
        auto num = [&](int a, int b) -> std::optional<int> {
            int v = 0;
            for (int i = a; i < b; ++i) {
                if (s[i] < '0' || s[i] > '9') return std::nullopt;
                v = v * 10 + (s[i] - '0');
            }
            return v;
        };
        auto y = num(0, 4), m = num(5, 7), d = num(8, 10);
        if (!y || !m || !d) return std::nullopt;
        Date out{*y, *m, *d};
        if (!out.valid()) return std::nullopt;
        return out;
    }
};

}  // namespace interlock

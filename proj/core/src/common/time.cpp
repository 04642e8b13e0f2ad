#include "aqa/time.hpp"

#include <charconv>
#include <cstdio>

#include "aqa/error.hpp"

namespace aqa {

namespace {

using namespace std::chrono;

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return ec == std::errc{} && ptr == s.data() + pos + len;
}

[[noreturn]] void bad_time(std::string_view text, const char* why) {
    throw ParseError("invalid timestamp '" + std::string(text) + "': " + why);
}

sys_days civil_day(std::string_view text, int y, int m, int d) {
    year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) bad_time(text, "date out of range");
    return sys_days{ymd};
}

// Monday of ISO week 1 of the given ISO year.
sys_days iso_week1_monday(int iso_year) {
    sys_days jan4 = year{iso_year} / January / 4;
    auto wd = weekday{jan4}.iso_encoding();  // 1 = Monday
    return jan4 - days{wd - 1};
}

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (!read_int(text, 0, 4, y) || text.size() < 10 || text[4] != '-' || !read_int(text, 5, 2, mo) ||
        text[7] != '-' || !read_int(text, 8, 2, d)) {
        bad_time(text, "expected YYYY-MM-DD");
    }
    sys_days day_point = civil_day(text, y, mo, d);
    if (text.size() == 10) return Timestamp{day_point.time_since_epoch()};
    if (text[10] != 'T' && text[10] != 't' && text[10] != ' ') bad_time(text, "expected 'T'");
    if (!read_int(text, 11, 2, h) || text.size() < 19 || text[13] != ':' || !read_int(text, 14, 2, mi) ||
        text[16] != ':' || !read_int(text, 17, 2, s)) {
        bad_time(text, "expected hh:mm:ss");
    }
    if (h > 23 || mi > 59 || s > 60) bad_time(text, "time out of range");
    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        std::size_t digits = 0;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos, ++digits;
        if (digits == 0) bad_time(text, "empty fraction");
    }
    seconds offset{0};
    if (pos == text.size()) {
        // No zone designator: read as UTC.
    } else if (text[pos] == 'Z' || text[pos] == 'z') {
        if (pos + 1 != text.size()) bad_time(text, "trailing characters");
    } else if (text[pos] == '+' || text[pos] == '-') {
        int oh = 0, om = 0;
        if (!read_int(text, pos + 1, 2, oh) || pos + 6 != text.size() || text[pos + 3] != ':' ||
            !read_int(text, pos + 4, 2, om)) {
            bad_time(text, "bad offset");
        }
        offset = hours{oh} + minutes{om};
        if (text[pos] == '-') offset = -offset;
    } else {
        bad_time(text, "bad zone designator");
    }
    Timestamp local = Timestamp{day_point.time_since_epoch()} + hours{h} + minutes{mi} + seconds{s};
    return local - offset;
}

std::string format_rfc3339(Timestamp t) {
    sys_days dp = floor<days>(t);
    year_month_day ymd{dp};
    hh_mm_ss hms{t - dp};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

TimeGranularity parse_granularity(std::string_view name) {
    if (name == "day") return TimeGranularity::Day;
    if (name == "week") return TimeGranularity::Week;
    if (name == "month") return TimeGranularity::Month;
    throw InvalidArgument("unknown time granularity '" + std::string(name) + "'");
}

std::string time_bucket(Timestamp t, TimeGranularity g) {
    sys_days dp = floor<days>(t);
    year_month_day ymd{dp};
    char buf[16];
    switch (g) {
        case TimeGranularity::Day:
            std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                          static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
            break;
        case TimeGranularity::Month:
            std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(ymd.year()),
                          static_cast<unsigned>(ymd.month()));
            break;
        case TimeGranularity::Week: {
            int iso_year = static_cast<int>(ymd.year());
            if (dp >= iso_week1_monday(iso_year + 1)) {
                ++iso_year;
            } else if (dp < iso_week1_monday(iso_year)) {
                --iso_year;
            }
            auto week = (dp - iso_week1_monday(iso_year)).count() / 7 + 1;
            std::snprintf(buf, sizeof buf, "%04d-W%02d", iso_year, static_cast<int>(week));
            break;
        }
    }
    return buf;
}

TimeRange month_range(int y, unsigned m) {
    year_month first{year{y}, month{m}};
    if (!first.ok()) throw ParseError("month out of range");
    sys_days b = first / 1;
    sys_days e = (first + months{1}) / 1;
    return {Timestamp{b.time_since_epoch()}, Timestamp{e.time_since_epoch()}};
}

TimeRange iso_week_range(int iso_year, unsigned week) {
    if (week < 1 || week > 53) throw ParseError("ISO week out of range");
    sys_days b = iso_week1_monday(iso_year) + days{7 * (week - 1)};
    if (week == 53 && b >= iso_week1_monday(iso_year + 1)) throw ParseError("year has no ISO week 53");
    return {Timestamp{b.time_since_epoch()}, Timestamp{(b + days{7}).time_since_epoch()}};
}

TimeRange parse_period(std::string_view p) {
    if (auto slash = p.find('/'); slash != std::string_view::npos) {
        TimeRange r{parse_rfc3339(p.substr(0, slash)), parse_rfc3339(p.substr(slash + 1))};
        if (!(r.begin < r.end)) throw ParseError("empty time range '" + std::string(p) + "'");
        return r;
    }
    int y = 0, a = 0, b = 0;
    if (p.size() == 7 && read_int(p, 0, 4, y) && p[4] == '-' && read_int(p, 5, 2, a)) {
        if (a < 1 || a > 12) throw ParseError("month out of range in '" + std::string(p) + "'");
        return month_range(y, static_cast<unsigned>(a));
    }
    if (p.size() == 8 && read_int(p, 0, 4, y) && p[4] == '-' && p[5] == 'W' && read_int(p, 6, 2, a)) {
        return iso_week_range(y, static_cast<unsigned>(a));
    }
    if (p.size() == 10 && read_int(p, 0, 4, y) && p[4] == '-' && read_int(p, 5, 2, a) && p[7] == '-' &&
        read_int(p, 8, 2, b)) {
        sys_days d = civil_day(p, y, a, b);
        return {Timestamp{d.time_since_epoch()}, Timestamp{(d + days{1}).time_since_epoch()}};
    }
    throw ParseError("unrecognized time period '" + std::string(p) + "'");
}

}  // namespace aqa

#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace aqa {

using Timestamp = std::chrono::sys_seconds;

/// Parses "2023-04-26T13:47:24Z", fractional seconds and "+hh:mm" offsets
/// included. Result is UTC. Throws ParseError.
Timestamp parse_rfc3339(std::string_view text);

/// Always UTC with a literal "Z" and whole seconds.
std::string format_rfc3339(Timestamp t);

/// Half-open [begin, end) interval in UTC.
struct TimeRange {
    Timestamp begin;
    Timestamp end;

    bool contains(Timestamp t) const noexcept { return begin <= t && t < end; }
    friend bool operator==(const TimeRange&, const TimeRange&) = default;
};

enum class TimeGranularity { Day, Week, Month };

TimeGranularity parse_granularity(std::string_view name);

/// Bucket label of a timestamp: "2023-04-26", "2023-W17" (ISO week) or "2023-04".
std::string time_bucket(Timestamp t, TimeGranularity g);

/// Inverse of time_bucket for any granularity, plus explicit
/// "<rfc3339>/<rfc3339>" ranges. Throws ParseError.
TimeRange parse_period(std::string_view period);

TimeRange month_range(int year, unsigned month);
TimeRange iso_week_range(int iso_year, unsigned week);

}  // namespace aqa

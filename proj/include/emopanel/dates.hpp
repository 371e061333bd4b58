#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace emopanel {

// Calendar date stored as days since 1970-01-01.
class Date {
public:
  constexpr Date() = default;
  constexpr explicit Date(std::int32_t days) : days_(days) {}

  static Date from_ymd(int year, unsigned month, unsigned day);
  // Parses "YYYY-MM-DD"; rejects anything else.
  static std::optional<Date> parse(std::string_view text);

  int year() const;
  unsigned month() const;
  unsigned day() const;
  // 0 = Sunday ... 6 = Saturday.
  int weekday() const { return (((days_ % 7) + 11) % 7); }

  std::int32_t days_since_epoch() const { return days_; }
  std::string to_string() const;

  Date operator+(std::int32_t n) const { return Date(days_ + n); }
  Date operator-(std::int32_t n) const { return Date(days_ - n); }
  auto operator<=>(const Date&) const = default;

private:
  std::int32_t days_ = 0;
};

// A UTC instant, seconds since the epoch.
struct Instant {
  std::int64_t utc_seconds = 0;
  auto operator<=>(const Instant&) const = default;
};

// Parses ISO-8601 with a mandatory zone designator: 2021-03-02T08:15:00-05:00,
// ...Z, or ...+hhmm. Fractional seconds are accepted and truncated.
// Returns the instant plus the offset used, so messages re-serialize verbatim.
struct ParsedTimestamp {
  Instant instant;
  std::int16_t offset_minutes = 0;
};
std::optional<ParsedTimestamp> parse_iso8601(std::string_view text);
std::string format_iso8601(Instant instant, std::int16_t offset_minutes);

// Wall-clock decomposition in US Eastern time (fixed post-2007 DST rule:
// second Sunday of March 02:00 to first Sunday of November 02:00).
struct EasternTime {
  Date date;
  int minute_of_day = 0;  // 0..1439
  int second = 0;         // 0..59
};
EasternTime to_eastern(Instant instant);
// Inverse helper for generators/tests: Eastern wall clock -> instant.
Instant eastern_to_instant(Date date, int minute_of_day, int second = 0);
// Eastern UTC offset in minutes at the given instant (-300 or -240).
int eastern_offset_minutes(Instant instant);

// Sorted unique list of trading dates with index lookups.
class TradingCalendar {
public:
  static TradingCalendar from_dates(std::vector<Date> dates);
  // One YYYY-MM-DD per line, '#' comments and blank lines ignored.
  static TradingCalendar load(const std::string& path);

  bool empty() const { return dates_.empty(); }
  std::size_t size() const { return dates_.size(); }
  const std::vector<Date>& dates() const { return dates_; }
  Date first() const { return dates_.front(); }
  Date last() const { return dates_.back(); }

  bool is_trading_day(Date d) const;
  std::optional<int> index_of(Date d) const;
  // k-th trading date strictly after d (d need not be a trading date).
  std::optional<Date> next_after(Date d, int k = 1) const;
  // First trading date >= d.
  std::optional<Date> on_or_after(Date d) const;

private:
  std::vector<Date> dates_;
  std::unordered_map<std::int32_t, int> index_;
};

}  // namespace emopanel

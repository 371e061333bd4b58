#include "emopanel/dates.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace emopanel {

namespace {

// Howard Hinnant's civil-from-days / days-from-civil algorithms.
std::int32_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int>(doe) - 719468;
}

struct Civil {
  int year;
  unsigned month;
  unsigned day;
};

Civil civil_from_days(std::int32_t z) {
  z += 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {y + (m <= 2), m, d};
}

bool parse_int(std::string_view s, int& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  return Date(days_from_civil(year, month, day));
}

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y, m, d;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
      !parse_int(text.substr(8, 2), d))
    return std::nullopt;
  if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
  return Date::from_ymd(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

int Date::year() const { return civil_from_days(days_).year; }
unsigned Date::month() const { return civil_from_days(days_).month; }
unsigned Date::day() const { return civil_from_days(days_).day; }

std::string Date::to_string() const {
  const Civil c = civil_from_days(days_);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", c.year, c.month, c.day);
  return buf;
}

std::optional<ParsedTimestamp> parse_iso8601(std::string_view text) {
  // Minimum: YYYY-MM-DDTHH:MM:SS<zone>
  if (text.size() < 20) return std::nullopt;
  auto date = Date::parse(text.substr(0, 10));
  if (!date) return std::nullopt;
  if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
  int hh, mm, ss;
  if (text[13] != ':' || text[16] != ':') return std::nullopt;
  if (!parse_int(text.substr(11, 2), hh) || !parse_int(text.substr(14, 2), mm) ||
      !parse_int(text.substr(17, 2), ss))
    return std::nullopt;
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
  }
  if (pos >= text.size()) return std::nullopt;
  int offset = 0;
  const char zc = text[pos];
  if (zc == 'Z' || zc == 'z') {
    if (pos + 1 != text.size()) return std::nullopt;
  } else if (zc == '+' || zc == '-') {
    std::string_view z = text.substr(pos + 1);
    int oh = 0, om = 0;
    if (z.size() == 5 && z[2] == ':') {
      if (!parse_int(z.substr(0, 2), oh) || !parse_int(z.substr(3, 2), om)) return std::nullopt;
    } else if (z.size() == 4) {
      if (!parse_int(z.substr(0, 2), oh) || !parse_int(z.substr(2, 2), om)) return std::nullopt;
    } else if (z.size() == 2) {
      if (!parse_int(z, oh)) return std::nullopt;
    } else {
      return std::nullopt;
    }
    if (oh > 18 || om > 59) return std::nullopt;
    offset = oh * 60 + om;
    if (zc == '-') offset = -offset;
  } else {
    return std::nullopt;
  }
  const std::int64_t local =
      static_cast<std::int64_t>(date->days_since_epoch()) * 86400 + hh * 3600 + mm * 60 + ss;
  ParsedTimestamp out;
  out.instant.utc_seconds = local - static_cast<std::int64_t>(offset) * 60;
  out.offset_minutes = static_cast<std::int16_t>(offset);
  return out;
}

std::string format_iso8601(Instant instant, std::int16_t offset_minutes) {
  const std::int64_t local = instant.utc_seconds + static_cast<std::int64_t>(offset_minutes) * 60;
  std::int64_t days = local / 86400;
  std::int64_t sod = local % 86400;
  if (sod < 0) {
    sod += 86400;
    --days;
  }
  const Date d(static_cast<std::int32_t>(days));
  const int hh = static_cast<int>(sod / 3600);
  const int mm = static_cast<int>((sod % 3600) / 60);
  const int ss = static_cast<int>(sod % 60);
  const int om = offset_minutes < 0 ? -offset_minutes : offset_minutes;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%s%sT%02d:%02d:%02d%c%02d:%02d", d.to_string().c_str(), "", hh,
                mm, ss, offset_minutes < 0 ? '-' : '+', om / 60, om % 60);
  return buf;
}

namespace {

// First Sunday on/after the given date.
Date first_sunday_on_or_after(Date d) {
  const int wd = d.weekday();
  return d + ((7 - wd) % 7);
}

// DST window for a year, as UTC instants: [second Sunday of March 07:00Z,
// first Sunday of November 06:00Z).
std::pair<std::int64_t, std::int64_t> dst_window_utc(int year) {
  const Date start_day = first_sunday_on_or_after(Date::from_ymd(year, 3, 8));
  const Date end_day = first_sunday_on_or_after(Date::from_ymd(year, 11, 1));
  const std::int64_t start =
      static_cast<std::int64_t>(start_day.days_since_epoch()) * 86400 + 7 * 3600;
  const std::int64_t end = static_cast<std::int64_t>(end_day.days_since_epoch()) * 86400 + 6 * 3600;
  return {start, end};
}

}  // namespace

int eastern_offset_minutes(Instant instant) {
  const std::int64_t t = instant.utc_seconds;
  const Date approx(static_cast<std::int32_t>(t >= 0 ? t / 86400 : (t - 86399) / 86400));
  const auto [start, end] = dst_window_utc(approx.year());
  return (t >= start && t < end) ? -240 : -300;
}

EasternTime to_eastern(Instant instant) {
  const std::int64_t local =
      instant.utc_seconds + static_cast<std::int64_t>(eastern_offset_minutes(instant)) * 60;
  std::int64_t days = local / 86400;
  std::int64_t sod = local % 86400;
  if (sod < 0) {
    sod += 86400;
    --days;
  }
  EasternTime out;
  out.date = Date(static_cast<std::int32_t>(days));
  out.minute_of_day = static_cast<int>(sod / 60);
  out.second = static_cast<int>(sod % 60);
  return out;
}

Instant eastern_to_instant(Date date, int minute_of_day, int second) {
  const std::int64_t local = static_cast<std::int64_t>(date.days_since_epoch()) * 86400 +
                             static_cast<std::int64_t>(minute_of_day) * 60 + second;
  // Guess standard time, then correct once; exact except inside the one-hour
  // spring-forward gap, where the standard-time reading is used.
  Instant guess{local + 300 * 60};
  const int off = eastern_offset_minutes(guess);
  Instant out{local - static_cast<std::int64_t>(off) * 60};
  if (eastern_offset_minutes(out) != off) {
    out.utc_seconds = local + 300 * 60;
  }
  return out;
}

TradingCalendar TradingCalendar::from_dates(std::vector<Date> dates) {
  std::sort(dates.begin(), dates.end());
  dates.erase(std::unique(dates.begin(), dates.end()), dates.end());
  TradingCalendar cal;
  cal.dates_ = std::move(dates);
  cal.index_.reserve(cal.dates_.size());
  for (std::size_t i = 0; i < cal.dates_.size(); ++i)
    cal.index_.emplace(cal.dates_[i].days_since_epoch(), static_cast<int>(i));
  return cal;
}

TradingCalendar TradingCalendar::load(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open calendar file: " + path);
  std::vector<Date> dates;
  char line[128];
  while (std::fgets(line, sizeof(line), f)) {
    std::string_view s(line);
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    if (s.empty() || s.front() == '#') continue;
    auto d = Date::parse(s);
    if (!d) {
      std::fclose(f);
      throw std::runtime_error("bad calendar line: " + std::string(s));
    }
    dates.push_back(*d);
  }
  std::fclose(f);
  return from_dates(std::move(dates));
}

bool TradingCalendar::is_trading_day(Date d) const {
  return index_.count(d.days_since_epoch()) != 0;
}

std::optional<int> TradingCalendar::index_of(Date d) const {
  auto it = index_.find(d.days_since_epoch());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<Date> TradingCalendar::next_after(Date d, int k) const {
  auto it = std::upper_bound(dates_.begin(), dates_.end(), d);
  const std::size_t i = static_cast<std::size_t>(it - dates_.begin()) + static_cast<std::size_t>(k) - 1;
  if (i >= dates_.size()) return std::nullopt;
  return dates_[i];
}

std::optional<Date> TradingCalendar::on_or_after(Date d) const {
  auto it = std::lower_bound(dates_.begin(), dates_.end(), d);
  if (it == dates_.end()) return std::nullopt;
  return *it;
}

}  // namespace emopanel

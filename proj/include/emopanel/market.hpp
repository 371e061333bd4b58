#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "emopanel/dates.hpp"
#include "emopanel/stats.hpp"

namespace emopanel {

struct PriceBar {
  std::string ticker;
  Date date;
  double open = 0;
  double close = 0;
  double shares_outstanding = 0;
  double share_volume = 0;
  int sic = 0;
};

// Per-date derived variables for one ticker. Missing values are NaN.
struct DerivedBar {
  Date date;
  double ret_oc = kMissing;       // (close - open) / open
  double ret_co = kMissing;       // (open_t - close_{t-1}) / close_{t-1}
  double ret_oc_lag1 = kMissing;  // previous trading date's ret_oc
  double ret_20_1 = kMissing;     // close_{t-1}/close_{t-21} - 1
  double vol_183_1 = kMissing;    // sd of close-to-close returns over [t-183, t-1]
  double dvol_183_1 = kMissing;   // mean log(1 + volume*(close+open)/2) over the window
  double mcap_lag1 = kMissing;    // log(1 + shares_{t-1} * close_{t-1})
  double dvol = kMissing;         // same-day log dollar volume
};

struct TrailingConfig {
  int window = 183;       // trailing rows ending at t-1
  int min_obs = 60;       // minimum non-missing observations, else missing
  int momentum_lag = 21;  // close_{t-1} vs close_{t-21}
};

struct RejectedBar {
  std::string ticker;
  Date date;
  std::string reason;
};

// Bars must be sorted by date with no duplicates; rows with non-positive
// prices are rejected with a diagnostic and excluded from every window.
struct ReturnsResult {
  std::vector<DerivedBar> rows;
  std::vector<PriceBar> accepted;  // validated bars, aligned with rows
  std::vector<RejectedBar> rejected;
};
ReturnsResult compute_returns(const std::string& ticker, std::vector<PriceBar> bars);
// Fills the trailing-window fields of rows produced by compute_returns.
void compute_trailing(std::vector<DerivedBar>& rows, const std::vector<PriceBar>& accepted_bars,
                      const TrailingConfig& cfg = {});

// Fama-French 12-industry code for a SIC in [0, 9999]; unmatched SICs map to
// 12 (Other). Out-of-range SIC throws.
int map_ff12(int sic);

enum class LowFreqKind { short_interest, institutional_ownership };

struct LowFreqRecord {
  std::string ticker;
  Date as_of;
  double value = 0;
  LowFreqKind kind = LowFreqKind::short_interest;
};

// As-of join: most recent record with as_of <= date (inclusive boundary by
// default); no prior record yields missing.
class LowFreqSeries {
public:
  void add(const LowFreqRecord& rec);
  void finalize();  // sorts by as_of per (ticker, kind)
  double value_asof(const std::string& ticker, LowFreqKind kind, Date date,
                    bool inclusive = true) const;

private:
  std::map<std::pair<std::string, int>, std::vector<std::pair<Date, double>>> series_;
};

// All derived market variables keyed by (ticker, date).
class MarketData {
public:
  struct Key {
    std::string ticker;
    std::int32_t date_days;
    bool operator<(const Key& o) const {
      return ticker < o.ticker || (ticker == o.ticker && date_days < o.date_days);
    }
  };

  void add_ticker(const std::string& ticker, int sic, const std::vector<DerivedBar>& rows);
  const DerivedBar* find(const std::string& ticker, Date date) const;
  int sic_of(const std::string& ticker) const;  // -1 when unknown
  const std::map<Key, DerivedBar>& rows() const { return rows_; }
  std::vector<RejectedBar> rejected;

private:
  std::map<Key, DerivedBar> rows_;
  std::unordered_map<std::string, int> sic_;
};

// CSV header: ticker,date,open,close,shares_outstanding,share_volume,sic
std::vector<PriceBar> load_price_csv(std::istream& in);
std::vector<PriceBar> load_price_csv_file(const std::string& path);
// CSV header: ticker,as_of_date,kind,value  (kind: short_interest |
// institutional_ownership)
std::vector<LowFreqRecord> load_lowfreq_csv(std::istream& in);
std::vector<LowFreqRecord> load_lowfreq_csv_file(const std::string& path);

// Groups bars by ticker, computes returns and trailing variables.
MarketData build_market_data(std::vector<PriceBar> bars, const TrailingConfig& cfg = {});

}  // namespace emopanel

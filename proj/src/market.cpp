#include "emopanel/market.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace emopanel {

ReturnsResult compute_returns(const std::string& ticker, std::vector<PriceBar> bars) {
  ReturnsResult result;
  for (std::size_t i = 1; i < bars.size(); ++i) {
    if (!(bars[i - 1].date < bars[i].date))
      throw std::invalid_argument("compute_returns: bars not strictly sorted by date for " +
                                  ticker);
  }
  result.accepted.reserve(bars.size());
  for (PriceBar& b : bars) {
    if (!(b.open > 0) || !(b.close > 0)) {
      result.rejected.push_back({ticker, b.date, "non-positive price"});
      continue;
    }
    result.accepted.push_back(std::move(b));
  }
  const auto& accepted = result.accepted;
  result.rows.resize(accepted.size());
  for (std::size_t t = 0; t < accepted.size(); ++t) {
    DerivedBar& row = result.rows[t];
    row.date = accepted[t].date;
    row.ret_oc = (accepted[t].close - accepted[t].open) / accepted[t].open;
    row.dvol = std::log1p(accepted[t].share_volume * (accepted[t].close + accepted[t].open) / 2.0);
    if (t > 0) {
      row.ret_co = (accepted[t].open - accepted[t - 1].close) / accepted[t - 1].close;
      row.ret_oc_lag1 = result.rows[t - 1].ret_oc;
    }
  }
  return result;
}

void compute_trailing(std::vector<DerivedBar>& rows, const std::vector<PriceBar>& bars,
                      const TrailingConfig& cfg) {
  const std::size_t n = rows.size();
  if (bars.size() != n) throw std::invalid_argument("compute_trailing: row/bar size mismatch");

  // Close-to-close daily returns; index s uses closes at s and s-1.
  std::vector<double> r(n, kMissing);
  for (std::size_t s = 1; s < n; ++s) r[s] = bars[s].close / bars[s - 1].close - 1.0;

  // Prefix sums over the return series (missing entries contribute nothing).
  std::vector<double> s1(n + 1, 0), s2(n + 1, 0), dv(n + 1, 0);
  std::vector<int> cnt(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const bool ok = !is_missing(r[i]);
    s1[i + 1] = s1[i] + (ok ? r[i] : 0.0);
    s2[i + 1] = s2[i] + (ok ? r[i] * r[i] : 0.0);
    cnt[i + 1] = cnt[i] + (ok ? 1 : 0);
    dv[i + 1] = dv[i] + rows[i].dvol;
  }

  for (std::size_t t = 0; t < n; ++t) {
    DerivedBar& row = rows[t];
    if (t >= 1) {
      row.mcap_lag1 = std::log1p(bars[t - 1].shares_outstanding * bars[t - 1].close);
    }
    if (t >= static_cast<std::size_t>(cfg.momentum_lag)) {
      row.ret_20_1 = bars[t - 1].close / bars[t - cfg.momentum_lag].close - 1.0;
    }
    if (t >= 1) {
      const std::size_t a = t >= static_cast<std::size_t>(cfg.window)
                                ? t - static_cast<std::size_t>(cfg.window)
                                : 0;
      const std::size_t b = t;  // window rows [a, t-1]; prefix index end = t
      const int c = cnt[b] - cnt[a];
      if (c >= cfg.min_obs) {
        const double sum = s1[b] - s1[a];
        const double sumsq = s2[b] - s2[a];
        const double var = std::max(0.0, (sumsq - sum * sum / c) / (c - 1));
        row.vol_183_1 = std::sqrt(var);
      }
      const int rows_in_window = static_cast<int>(b - a);
      if (rows_in_window >= cfg.min_obs) {
        row.dvol_183_1 = (dv[b] - dv[a]) / rows_in_window;
      }
    }
  }
}

namespace {

struct SicRange {
  int lo;
  int hi;
  int industry;
};

// Fama-French 12-industry SIC ranges; everything unmatched is 12 (Other).
constexpr SicRange kFf12Ranges[] = {
    {100, 999, 1},    {2000, 2399, 1},  {2700, 2749, 1},  {2770, 2799, 1},  {3100, 3199, 1},
    {3940, 3989, 1},  {2500, 2519, 2},  {2590, 2599, 2},  {3630, 3659, 2},  {3710, 3711, 2},
    {3714, 3714, 2},  {3716, 3716, 2},  {3750, 3751, 2},  {3792, 3792, 2},  {3900, 3939, 2},
    {3990, 3999, 2},  {2520, 2589, 3},  {2600, 2699, 3},  {2750, 2769, 3},  {3000, 3099, 3},
    {3200, 3569, 3},  {3580, 3629, 3},  {3700, 3709, 3},  {3712, 3713, 3},  {3715, 3715, 3},
    {3717, 3749, 3},  {3752, 3791, 3},  {3793, 3799, 3},  {3830, 3839, 3},  {3860, 3899, 3},
    {1200, 1399, 4},  {2900, 2999, 4},  {2800, 2829, 5},  {2840, 2899, 5},  {3570, 3579, 6},
    {3660, 3692, 6},  {3694, 3699, 6},  {3810, 3829, 6},  {7370, 7379, 6},  {4800, 4899, 7},
    {4900, 4949, 8},  {5000, 5999, 9},  {7200, 7299, 9},  {7600, 7699, 9},  {2830, 2839, 10},
    {3693, 3693, 10}, {3840, 3859, 10}, {8000, 8099, 10}, {6000, 6999, 11},
};

}  // namespace

int map_ff12(int sic) {
  if (sic < 0 || sic > 9999) throw std::out_of_range("map_ff12: SIC outside [0, 9999]");
  for (const SicRange& r : kFf12Ranges)
    if (sic >= r.lo && sic <= r.hi) return r.industry;
  return 12;
}

void LowFreqSeries::add(const LowFreqRecord& rec) {
  series_[{rec.ticker, static_cast<int>(rec.kind)}].emplace_back(rec.as_of, rec.value);
}

void LowFreqSeries::finalize() {
  for (auto& [key, vec] : series_) {
    std::sort(vec.begin(), vec.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < vec.size(); ++i)
      if (vec[i].first == vec[i - 1].first)
        throw std::invalid_argument("low-frequency series: duplicate as-of date for " + key.first);
  }
}

double LowFreqSeries::value_asof(const std::string& ticker, LowFreqKind kind, Date date,
                                 bool inclusive) const {
  const auto it = series_.find({ticker, static_cast<int>(kind)});
  if (it == series_.end()) return kMissing;
  const auto& vec = it->second;
  const Date cutoff = inclusive ? date : date - 1;
  auto pos = std::upper_bound(vec.begin(), vec.end(), cutoff,
                              [](Date d, const auto& p) { return d < p.first; });
  if (pos == vec.begin()) return kMissing;
  return std::prev(pos)->second;
}

void MarketData::add_ticker(const std::string& ticker, int sic,
                            const std::vector<DerivedBar>& rows) {
  sic_[ticker] = sic;
  for (const DerivedBar& row : rows) rows_[{ticker, row.date.days_since_epoch()}] = row;
}

const DerivedBar* MarketData::find(const std::string& ticker, Date date) const {
  const auto it = rows_.find({ticker, date.days_since_epoch()});
  return it == rows_.end() ? nullptr : &it->second;
}

int MarketData::sic_of(const std::string& ticker) const {
  const auto it = sic_.find(ticker);
  return it == sic_.end() ? -1 : it->second;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

}  // namespace

std::vector<PriceBar> load_price_csv(std::istream& in) {
  std::vector<PriceBar> bars;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("price file: empty");
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (f.size() < 7) throw std::runtime_error("price file: bad row: " + line);
    PriceBar b;
    b.ticker = f[0];
    const auto d = Date::parse(f[1]);
    if (!d) throw std::runtime_error("price file: bad date: " + f[1]);
    b.date = *d;
    b.open = std::stod(f[2]);
    b.close = std::stod(f[3]);
    b.shares_outstanding = std::stod(f[4]);
    b.share_volume = std::stod(f[5]);
    b.sic = std::stoi(f[6]);
    bars.push_back(std::move(b));
  }
  return bars;
}

std::vector<PriceBar> load_price_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open price file: " + path);
  return load_price_csv(in);
}

std::vector<LowFreqRecord> load_lowfreq_csv(std::istream& in) {
  std::vector<LowFreqRecord> recs;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("low-frequency file: empty");
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (f.size() < 4) throw std::runtime_error("low-frequency file: bad row: " + line);
    LowFreqRecord r;
    r.ticker = f[0];
    const auto d = Date::parse(f[1]);
    if (!d) throw std::runtime_error("low-frequency file: bad date: " + f[1]);
    r.as_of = *d;
    if (f[2] == "short_interest")
      r.kind = LowFreqKind::short_interest;
    else if (f[2] == "institutional_ownership")
      r.kind = LowFreqKind::institutional_ownership;
    else
      throw std::runtime_error("low-frequency file: bad kind: " + f[2]);
    r.value = std::stod(f[3]);
    recs.push_back(std::move(r));
  }
  return recs;
}

std::vector<LowFreqRecord> load_lowfreq_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open low-frequency file: " + path);
  return load_lowfreq_csv(in);
}

MarketData build_market_data(std::vector<PriceBar> bars, const TrailingConfig& cfg) {
  std::map<std::string, std::vector<PriceBar>> by_ticker;
  for (PriceBar& b : bars) by_ticker[b.ticker].push_back(std::move(b));
  MarketData data;
  for (auto& [ticker, series] : by_ticker) {
    std::sort(series.begin(), series.end(),
              [](const PriceBar& a, const PriceBar& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < series.size(); ++i)
      if (series[i].date == series[i - 1].date)
        throw std::invalid_argument("price data: duplicate (ticker, date) for " + ticker);
    const int sic = series.front().sic;
    ReturnsResult rr = compute_returns(ticker, std::move(series));
    compute_trailing(rr.rows, rr.accepted, cfg);
    data.add_ticker(ticker, sic, rr.rows);
    for (RejectedBar& rej : rr.rejected) data.rejected.push_back(std::move(rej));
  }
  return data;
}

}  // namespace emopanel

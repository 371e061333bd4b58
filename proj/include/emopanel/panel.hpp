#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "emopanel/ingest.hpp"
#include "emopanel/market.hpp"
#include "emopanel/sessions.hpp"
#include "emopanel/stats.hpp"
#include "emopanel/types.hpp"

namespace emopanel {

enum class WeightMode { follower, equal };

// Message weight under follower weighting: 1 + ln(1 + followers).
inline double follower_weight(double follower_count) {
  return 1.0 + std::log1p(follower_count);
}

// Streaming weighted mean of emotion tuples; merges associatively.
struct TupleAccumulator {
  double weight_sum = 0;
  std::array<double, EmotionTuple::kSize> sums{};
  std::int64_t count = 0;

  void add(const EmotionTuple& t, double w) {
    weight_sum += w;
    for (int i = 0; i < EmotionTuple::kSize; ++i) sums[i] += w * t[i];
    ++count;
  }
  void merge(const TupleAccumulator& o) {
    weight_sum += o.weight_sum;
    for (int i = 0; i < EmotionTuple::kSize; ++i) sums[i] += o.sums[i];
    count += o.count;
  }
  EmotionTuple mean() const;
};

// Component-wise weighted mean; throws on empty input.
EmotionTuple aggregate_emotions(std::span<const RawMessage> messages, WeightMode mode);

// happy - sad - anger - disgust - fear, in [-1, 1].
double compute_valence(const EmotionTuple& t);

struct ColumnMeta {
  std::string name;
  std::string units;        // "return", "share", "log_dollars", "fraction", "count", "code", ...
  bool winsorized = false;  // set when the stored values have been clipped
  bool continuous = true;   // winsorization at fit time applies only to these
};

// Rectangular column store keyed by (ticker, date). All columns share the row
// axis; missing entries are NaN.
class Panel {
public:
  std::size_t rows() const { return tickers_.size(); }
  const std::vector<std::string>& tickers() const { return tickers_; }
  const std::vector<Date>& dates() const { return dates_; }

  // Appends one row; keys must stay unique (checked on finalize_keys).
  void add_row(std::string ticker, Date date);
  void finalize_keys();  // throws on duplicate (ticker, date)

  bool has_column(const std::string& name) const;
  void add_column(const std::string& name, std::vector<double> values, ColumnMeta meta);
  const std::vector<double>& column(const std::string& name) const;
  std::vector<double>& column_mut(const std::string& name);
  const ColumnMeta& meta(const std::string& name) const;
  std::vector<std::string> column_names() const;  // insertion order

  // Dense group codes for "firm" / "date" keys or any stored column whose
  // values are discrete; labels sorted for determinism.
  std::vector<int> group_ids(const std::string& dim) const;
  int group_count(const std::string& dim) const;

  void save_csv(const std::string& path) const;
  void save_meta_json(const std::string& path) const;
  static Panel load_csv(const std::string& csv_path, const std::string& meta_path);

private:
  std::vector<std::string> tickers_;
  std::vector<Date> dates_;
  std::vector<std::string> order_;
  std::map<std::string, std::vector<double>> columns_;
  std::map<std::string, ColumnMeta> meta_;
};

// Names of the per-message split axes used in aggregate columns.
// Sessions: "pre", "mkt". Splits: all, fin, chat, orig, diss, amateur, prof,
// fund, tech, short, long. Column name: <session>_<split>_<emotion>.
std::vector<std::string> aggregate_split_names();

struct AggregateConfig {
  WeightMode weight_mode = WeightMode::follower;
  bool equal_weight_extra = true;  // also emit eqw_pre_all_* columns
  bool alt_tuple = true;           // emit alt_pre_all_* when messages carry one
  SessionConfig session;
};

// Firm-day aggregate rows before controls are joined in.
struct FirmDayAggregates {
  // ordered by (ticker, date) for determinism
  struct Row {
    std::string ticker;
    Date date;
    std::map<std::string, TupleAccumulator> cells;  // key: <session>_<split> (+ eqw_/alt_ prefixes)
  };
  std::vector<Row> rows;
};

FirmDayAggregates build_aggregates(std::span<const RawMessage> kept,
                                   const TradingCalendar& calendar, const FinanceLexicon& lexicon,
                                   const AggregateConfig& cfg);

struct AssembleConfig {
  int lead_count = 4;
  bool lowfreq_inclusive = true;
};

// Inner join of firm-day aggregates with market controls; adds lead open-close
// returns looked up on the trading calendar, low-frequency as-of values, the
// FF-12 industry code, and the index-membership flag.
Panel assemble_panel(const FirmDayAggregates& aggregates, const MarketData& market,
                     const LowFreqSeries& lowfreq, const TradingCalendar& calendar,
                     const std::unordered_set<std::string>& index_members,
                     const AssembleConfig& cfg = {});

}  // namespace emopanel

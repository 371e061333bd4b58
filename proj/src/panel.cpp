#include "emopanel/panel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace emopanel {

EmotionTuple TupleAccumulator::mean() const {
  if (count == 0 || weight_sum <= 0) throw std::logic_error("TupleAccumulator: empty");
  EmotionTuple out;
  for (int i = 0; i < EmotionTuple::kSize; ++i) out[i] = sums[i] / weight_sum;
  return out;
}

EmotionTuple aggregate_emotions(std::span<const RawMessage> messages, WeightMode mode) {
  if (messages.empty()) throw std::invalid_argument("aggregate_emotions: empty input");
  TupleAccumulator acc;
  for (const RawMessage& m : messages) {
    if (!m.emotion) throw std::invalid_argument("aggregate_emotions: message without tuple");
    const double w =
        mode == WeightMode::follower ? follower_weight(static_cast<double>(m.follower_count)) : 1.0;
    acc.add(*m.emotion, w);
  }
  return acc.mean();
}

double compute_valence(const EmotionTuple& t) {
  return t.happy - t.sad - t.anger - t.disgust - t.fear;
}

void Panel::add_row(std::string ticker, Date date) {
  tickers_.push_back(std::move(ticker));
  dates_.push_back(date);
}

void Panel::finalize_keys() {
  std::set<std::pair<std::string, std::int32_t>> seen;
  for (std::size_t i = 0; i < rows(); ++i)
    if (!seen.emplace(tickers_[i], dates_[i].days_since_epoch()).second)
      throw std::invalid_argument("panel: duplicate (ticker, date): " + tickers_[i] + " " +
                                  dates_[i].to_string());
}

bool Panel::has_column(const std::string& name) const { return columns_.count(name) != 0; }

void Panel::add_column(const std::string& name, std::vector<double> values, ColumnMeta meta) {
  if (values.size() != rows())
    throw std::invalid_argument("panel: column length mismatch for " + name);
  if (!columns_.count(name)) order_.push_back(name);
  meta.name = name;
  columns_[name] = std::move(values);
  meta_[name] = std::move(meta);
}

const std::vector<double>& Panel::column(const std::string& name) const {
  const auto it = columns_.find(name);
  if (it == columns_.end()) throw std::out_of_range("panel: no column named " + name);
  return it->second;
}

std::vector<double>& Panel::column_mut(const std::string& name) {
  const auto it = columns_.find(name);
  if (it == columns_.end()) throw std::out_of_range("panel: no column named " + name);
  return it->second;
}

const ColumnMeta& Panel::meta(const std::string& name) const {
  const auto it = meta_.find(name);
  if (it == meta_.end()) throw std::out_of_range("panel: no column named " + name);
  return it->second;
}

std::vector<std::string> Panel::column_names() const { return order_; }

std::vector<int> Panel::group_ids(const std::string& dim) const {
  std::vector<int> ids(rows(), -1);
  if (dim == "firm") {
    std::map<std::string, int> codes;
    for (const std::string& t : tickers_) codes.emplace(t, 0);
    int next = 0;
    for (auto& [k, v] : codes) v = next++;
    for (std::size_t i = 0; i < rows(); ++i) ids[i] = codes[tickers_[i]];
    return ids;
  }
  if (dim == "date") {
    std::map<std::int32_t, int> codes;
    for (Date d : dates_) codes.emplace(d.days_since_epoch(), 0);
    int next = 0;
    for (auto& [k, v] : codes) v = next++;
    for (std::size_t i = 0; i < rows(); ++i) ids[i] = codes[dates_[i].days_since_epoch()];
    return ids;
  }
  const std::vector<double>& col = column(dim);
  std::map<double, int> codes;
  for (double v : col)
    if (!is_missing(v)) codes.emplace(v, 0);
  int next = 0;
  for (auto& [k, v] : codes) v = next++;
  for (std::size_t i = 0; i < rows(); ++i)
    if (!is_missing(col[i])) ids[i] = codes[col[i]];
  return ids;
}

int Panel::group_count(const std::string& dim) const {
  const auto ids = group_ids(dim);
  int mx = -1;
  for (int v : ids) mx = std::max(mx, v);
  return mx + 1;
}

namespace {

std::string format_value(double v) {
  if (is_missing(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void Panel::save_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write panel csv: " + path);
  out << "ticker,date";
  for (const std::string& c : order_) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < rows(); ++i) {
    out << tickers_[i] << ',' << dates_[i].to_string();
    for (const std::string& c : order_) out << ',' << format_value(columns_.at(c)[i]);
    out << '\n';
  }
}

void Panel::save_meta_json(const std::string& path) const {
  nlohmann::ordered_json j;
  j["rows"] = rows();
  auto cols = nlohmann::ordered_json::array();
  for (const std::string& c : order_) {
    const ColumnMeta& m = meta_.at(c);
    cols.push_back({{"name", m.name},
                    {"units", m.units},
                    {"winsorized", m.winsorized},
                    {"continuous", m.continuous}});
  }
  j["columns"] = cols;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write panel metadata: " + path);
  out << j.dump(2) << '\n';
}

Panel Panel::load_csv(const std::string& csv_path, const std::string& meta_path) {
  std::ifstream meta_in(meta_path, std::ios::binary);
  if (!meta_in) throw std::runtime_error("cannot open panel metadata: " + meta_path);
  nlohmann::json meta_json = nlohmann::json::parse(meta_in);

  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open panel csv: " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("panel csv: empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) header.push_back(field);
  }
  if (header.size() < 2 || header[0] != "ticker" || header[1] != "date")
    throw std::runtime_error("panel csv: bad header");

  Panel p;
  std::vector<std::vector<double>> cols(header.size() - 2);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    fields.resize(header.size());
    const auto d = Date::parse(fields[1]);
    if (!d) throw std::runtime_error("panel csv: bad date: " + fields[1]);
    p.add_row(fields[0], *d);
    for (std::size_t c = 2; c < header.size(); ++c)
      cols[c - 2].push_back(fields[c].empty() ? kMissing : std::stod(fields[c]));
  }
  p.finalize_keys();
  std::map<std::string, ColumnMeta> meta_by_name;
  for (const auto& cj : meta_json.at("columns")) {
    ColumnMeta m;
    m.name = cj.at("name").get<std::string>();
    m.units = cj.at("units").get<std::string>();
    m.winsorized = cj.at("winsorized").get<bool>();
    m.continuous = cj.at("continuous").get<bool>();
    meta_by_name[m.name] = m;
  }
  for (std::size_t c = 2; c < header.size(); ++c) {
    ColumnMeta m;
    const auto it = meta_by_name.find(header[c]);
    if (it != meta_by_name.end()) m = it->second;
    p.add_column(header[c], std::move(cols[c - 2]), m);
  }
  return p;
}

std::vector<std::string> aggregate_split_names() {
  return {"all", "fin", "chat", "orig", "diss", "amateur", "prof", "fund", "tech", "short", "long"};
}

FirmDayAggregates build_aggregates(std::span<const RawMessage> kept,
                                   const TradingCalendar& calendar, const FinanceLexicon& lexicon,
                                   const AggregateConfig& cfg) {
  std::map<std::pair<std::string, std::int32_t>, std::map<std::string, TupleAccumulator>> groups;

  for (const RawMessage& m : kept) {
    if (!m.emotion) continue;
    if (m.cashtags.empty()) continue;
    const auto assignment = assign_session(m.timestamp, calendar, cfg.session);
    if (!assignment) continue;
    const char* sess = assignment->window == SessionWindow::PreMarket ? "pre" : "mkt";
    const ContentLabel label = classify_content(m, lexicon);
    const UserBuckets buckets = bucket_user(m);

    std::vector<std::string> splits;
    splits.reserve(6);
    splits.emplace_back("all");
    splits.emplace_back(label.chat_class == ChatClass::finance ? "fin" : "chat");
    splits.emplace_back(label.info_class == InfoClass::original ? "orig" : "diss");
    if (buckets.experience == ExperienceBucket::amateur) splits.emplace_back("amateur");
    if (buckets.experience == ExperienceBucket::professional) splits.emplace_back("prof");
    if (buckets.approach == ApproachBucket::fundamental) splits.emplace_back("fund");
    if (buckets.approach == ApproachBucket::technical) splits.emplace_back("tech");
    if (buckets.horizon == HorizonBucket::short_horizon) splits.emplace_back("short");
    if (buckets.horizon == HorizonBucket::long_horizon) splits.emplace_back("long");

    const double w = cfg.weight_mode == WeightMode::follower
                         ? follower_weight(static_cast<double>(m.follower_count))
                         : 1.0;
    auto& cells = groups[{m.cashtags.front(), assignment->trading_date.days_since_epoch()}];
    for (const std::string& split : splits) {
      std::string key = sess;
      key.push_back('_');
      key += split;
      cells[key].add(*m.emotion, w);
    }
    if (assignment->window == SessionWindow::PreMarket) {
      if (cfg.equal_weight_extra) cells["eqw_pre_all"].add(*m.emotion, 1.0);
      if (cfg.alt_tuple && m.emotion_alt) cells["alt_pre_all"].add(*m.emotion_alt, w);
    }
  }

  FirmDayAggregates out;
  out.rows.reserve(groups.size());
  for (auto& [key, cells] : groups) {
    FirmDayAggregates::Row row;
    row.ticker = key.first;
    row.date = Date(key.second);
    row.cells = std::move(cells);
    out.rows.push_back(std::move(row));
  }
  return out;
}

namespace {

ColumnMeta share_meta() { return {"", "share", false, true}; }
ColumnMeta count_meta() { return {"", "count", false, false}; }

}  // namespace

Panel assemble_panel(const FirmDayAggregates& aggregates, const MarketData& market,
                     const LowFreqSeries& lowfreq, const TradingCalendar& calendar,
                     const std::unordered_set<std::string>& index_members,
                     const AssembleConfig& cfg) {
  // Aggregate cell keys present anywhere define the column set.
  std::set<std::string> cell_keys;
  for (const auto& row : aggregates.rows)
    for (const auto& [key, acc] : row.cells) cell_keys.insert(key);
  for (const char* sess : {"pre", "mkt"})
    for (const std::string& split : aggregate_split_names())
      cell_keys.insert(std::string(sess) + "_" + split);

  Panel panel;
  std::vector<const FirmDayAggregates::Row*> joined;
  std::vector<const DerivedBar*> bars;
  for (const auto& row : aggregates.rows) {
    const DerivedBar* bar = market.find(row.ticker, row.date);
    if (!bar) continue;  // inner join with controls
    panel.add_row(row.ticker, row.date);
    joined.push_back(&row);
    bars.push_back(bar);
  }
  panel.finalize_keys();
  const std::size_t n = panel.rows();

  for (const std::string& key : cell_keys) {
    std::array<std::vector<double>, EmotionTuple::kSize> emo;
    for (auto& v : emo) v.assign(n, kMissing);
    std::vector<double> counts(n, kMissing);
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = joined[i]->cells.find(key);
      if (it == joined[i]->cells.end()) continue;
      const EmotionTuple t = it->second.mean();
      for (int e = 0; e < EmotionTuple::kSize; ++e) emo[e][i] = t[e];
      counts[i] = static_cast<double>(it->second.count);
    }
    for (int e = 0; e < EmotionTuple::kSize; ++e)
      panel.add_column(key + "_" + kEmotionNames[e], std::move(emo[e]), share_meta());
    panel.add_column("n_" + key, std::move(counts), count_meta());
  }

  // Valence for the headline aggregates that exist as columns.
  for (const std::string& base : {std::string("pre_all"), std::string("mkt_all"),
                                  std::string("eqw_pre_all"), std::string("alt_pre_all")}) {
    if (!panel.has_column(base + "_happy")) continue;
    std::vector<double> val(n, kMissing);
    const auto& happy = panel.column(base + "_happy");
    const auto& sad = panel.column(base + "_sad");
    const auto& anger = panel.column(base + "_anger");
    const auto& disgust = panel.column(base + "_disgust");
    const auto& fear = panel.column(base + "_fear");
    for (std::size_t i = 0; i < n; ++i)
      if (!is_missing(happy[i])) val[i] = happy[i] - sad[i] - anger[i] - disgust[i] - fear[i];
    panel.add_column(base + "_valence", std::move(val), {"", "valence", false, true});
  }

  auto add_bar_column = [&](const std::string& name, double DerivedBar::*field,
                            const char* units) {
    std::vector<double> v(n, kMissing);
    for (std::size_t i = 0; i < n; ++i) v[i] = bars[i]->*field;
    panel.add_column(name, std::move(v), {"", units, false, true});
  };
  add_bar_column("ret_oc", &DerivedBar::ret_oc, "return");
  add_bar_column("ret_co", &DerivedBar::ret_co, "return");
  add_bar_column("ret_oc_lag1", &DerivedBar::ret_oc_lag1, "return");
  add_bar_column("ret_20_1", &DerivedBar::ret_20_1, "return");
  add_bar_column("vol_183_1", &DerivedBar::vol_183_1, "return_sd");
  add_bar_column("dvol_183_1", &DerivedBar::dvol_183_1, "log_dollars");
  add_bar_column("mcap_lag1", &DerivedBar::mcap_lag1, "log_dollars");
  add_bar_column("dvol", &DerivedBar::dvol, "log_dollars");

  {
    std::vector<double> si(n, kMissing), io(n, kMissing);
    for (std::size_t i = 0; i < n; ++i) {
      si[i] = lowfreq.value_asof(panel.tickers()[i], LowFreqKind::short_interest, panel.dates()[i],
                                 cfg.lowfreq_inclusive);
      io[i] = lowfreq.value_asof(panel.tickers()[i], LowFreqKind::institutional_ownership,
                                 panel.dates()[i], cfg.lowfreq_inclusive);
    }
    panel.add_column("short_interest", std::move(si), {"", "fraction", false, true});
    panel.add_column("inst_own", std::move(io), {"", "fraction", false, true});
  }

  {
    std::vector<double> ff(n, kMissing), idx(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const int sic = market.sic_of(panel.tickers()[i]);
      if (sic >= 0) ff[i] = static_cast<double>(map_ff12(sic));
      idx[i] = index_members.count(panel.tickers()[i]) ? 1.0 : 0.0;
    }
    panel.add_column("ff12", std::move(ff), {"", "code", false, false});
    panel.add_column("is_index", std::move(idx), {"", "code", false, false});
  }

  for (int k = 1; k <= cfg.lead_count; ++k) {
    std::vector<double> lead(n, kMissing);
    for (std::size_t i = 0; i < n; ++i) {
      const auto next = calendar.next_after(panel.dates()[i], k);
      if (!next) continue;
      const DerivedBar* bar = market.find(panel.tickers()[i], *next);
      if (bar) lead[i] = bar->ret_oc;
    }
    panel.add_column("lead_ret_oc_" + std::to_string(k), std::move(lead),
                     {"", "return", false, true});
  }

  return panel;
}

}  // namespace emopanel

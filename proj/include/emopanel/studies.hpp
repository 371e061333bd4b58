#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emopanel/econ.hpp"
#include "emopanel/panel.hpp"

namespace emopanel {

enum class TableId {
  summary_t2,
  corr_t3,
  labtests_t3,
  premarket_t4,
  content_t5,
  leads_t6,
  interactions_t7,
  usertypes_t8,
  robustness_t9,
  market_t10,
  appendix_year_a2,
  appendix_industry_a3,
};

std::string table_id_name(TableId id);  // "T2", "T3corr", "T3", "T4", ... "A2", "A3"
std::optional<TableId> parse_table_id(const std::string& name);
std::vector<TableId> all_table_ids();

inline int star_count(double p) {
  if (is_missing(p)) return 0;
  if (p < 0.01) return 3;
  if (p < 0.05) return 2;
  if (p < 0.10) return 1;
  return 0;
}

struct TableCell {
  std::string term;
  double estimate = kMissing;
  double se = kMissing;
  double p = kMissing;
  double aux1 = kMissing;  // within-sd in summaries; post counts in appendix reports
  double aux2 = kMissing;
  int stars = 0;
  std::string note;  // verdict text for sign tests
};

struct TableColumn {
  std::string label;
  std::vector<TableCell> cells;
  double n_obs = kMissing;
  double r_squared = kMissing;
  double within_sd = kMissing;
};

struct TablePanelBlock {
  std::string label;
  std::vector<TableColumn> columns;
};

struct TableArtifact {
  std::string table_id;
  std::string title;
  std::vector<TablePanelBlock> panels;
};

struct EconConfig {
  DemeanConfig demean;
  double winsor_lower = 0.001;
  double winsor_upper = 0.999;
};

// Adds pooled-percentile interaction dummies (iv_*) derived from existing
// control columns; idempotent.
void ensure_derived_columns(Panel& panel);

// Catalog of every named regression specification behind the study tables.
std::map<std::string, RegressionSpec> spec_catalog(const EconConfig& econ = {});

// Builds one study artifact. May add derived columns to the panel.
TableArtifact run_table(TableId id, Panel& panel, const EconConfig& econ = {});

// Stable structural dump (panel labels, column labels, term lists) used by
// schema snapshot tests.
std::string schema_signature(const TableArtifact& artifact);

// ---------------------------------------------------------------------------
// Synthetic data with a planted data-generating process.

struct SyntheticConfig {
  int n_firms = 50;
  int n_dates = 60;      // trading days carrying messages
  int burnin_days = 200; // price history before the message period
  Date start_date = Date::from_ymd(2015, 1, 5);

  // Messages per firm-day session: floor + lognormal tail, capped.
  int msg_floor = 10;
  int msg_cap = 400;
  double msg_log_mu = 0.6;
  double msg_log_sigma = 0.8;
  bool market_messages = true;
  bool alt_tuple = false;
  int n_users = 10000;

  double follower_log_mu = 4.0;
  double follower_log_sigma = 2.0;

  // Emotion shares: Dirichlet around the target means (component order:
  // neutral, happy, sad, anger, disgust, surprise, fear).
  std::array<double, 7> emotion_mean = {0.511, 0.246, 0.036, 0.024, 0.037, 0.062, 0.085};
  double emotion_concentration = 12.0;

  // Planted coefficients on the firm-day pre-market aggregates (index by
  // emotion; the neutral entry is the omitted reference and must be 0).
  std::array<double, 7> beta = {0.0, 0.0052, -0.0242, -0.0050, -0.0041, -0.0068, -0.0064};
  double gamma_lag = 0.0;  // on the previous day's open-close return
  double zeta_co = -0.05;  // on the close-open return
  double fe_firm_sd = 0.005;
  double fe_date_sd = 0.005;
  double noise_sd = 0.01;
  double co_sd = 0.02;  // close-open shock

  double base_price_log_mu = 3.5;
  double base_price_log_sd = 1.0;
  double shares_log_mu = 17.0;
  double shares_log_sd = 1.5;
  double volume_log_mu = 12.0;
  double volume_log_sd = 1.0;

  double index_fraction = 0.3;

  // Couplings that plant the sign-test relations: market-session happiness
  // response to the same-day return, a firm-size tilt in pre-market fear, and
  // a volume response to market-session fear.
  double market_coupling = 1.0;
  double fear_size_link = 0.0;
  double fear_volume_link = 0.0;

  // Message metadata mix.
  double p_retweet = 0.15;
  double p_url = 0.10;
  double p_finance = 0.5;
  double p_meta_unknown = 0.25;

  // Normalizes near-simplex target means; throws when infeasible.
  void validate_and_normalize();
};

struct SyntheticPaths {
  std::string messages;
  std::string prices;
  std::string security_master;
  std::string calendar;
  std::string lowfreq;
  std::string index_members;
};

// Emits the full file set in the external formats; byte-identical per seed.
void generate_synthetic(const SyntheticConfig& cfg, std::uint64_t seed,
                        const SyntheticPaths& paths);

// Same draws as generate_synthetic, fused straight into an estimation panel
// (pre/market "all" aggregates plus controls); used by the recovery and
// calibration experiments where file round-trips would dominate the budget.
Panel generate_synthetic_panel(const SyntheticConfig& cfg, std::uint64_t seed);

// The specification whose coefficients the generator plants.
RegressionSpec recovery_spec(const EconConfig& econ = {});
// Planted truth per recovery_spec term.
std::vector<std::pair<std::string, double>> planted_values(const SyntheticConfig& cfg);

struct TermRecovery {
  std::string term;
  double true_value = 0;
  double coverage = 0;        // share of seeds whose CI covers the truth
  double mean_bias = 0;
  double sign_agreement = 0;  // share of seeds with matching coefficient sign
  double rejection_rate = 0;  // share of seeds with p < 0.05
  double median_abs_t = 0;
};

struct RecoveryReport {
  std::vector<TermRecovery> terms;
  int n_seeds = 0;
  double ci_level = 0.95;
  double elapsed_seconds = 0;
};

// Runs generate -> panel -> fit across seeds (in parallel; results do not
// depend on the thread count). Throws naming the seed on any failure.
RecoveryReport recovery_experiment(const SyntheticConfig& cfg, int n_seeds,
                                   std::uint64_t master_seed, int n_threads = 0,
                                   double ci_level = 0.95);

}  // namespace emopanel

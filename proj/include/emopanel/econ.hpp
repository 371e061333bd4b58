#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emopanel/panel.hpp"
#include "emopanel/stats.hpp"

namespace emopanel {

struct DemeanConfig {
  double tolerance = 1e-10;   // max absolute group mean of residuals
  int max_iterations = 10000;
};

// Alternating-projection removal of group means along one or two id
// dimensions, in place. Ids must be dense 0..G-1 codes, one per row. Iterates
// until every group mean of every column is within tolerance; throws with the
// worst offending group mean on non-convergence.
void demean_groups(Eigen::MatrixXd& columns, const std::vector<std::vector<int>>& dim_ids,
                   const DemeanConfig& cfg = {});

// Convenience overload for a single column.
std::vector<double> demean_two_way(const std::vector<double>& column,
                                   const std::vector<int>& firm_ids,
                                   const std::vector<int>& date_ids, const DemeanConfig& cfg = {});

// Sample standard deviation after two-way demeaning; rows with missing values
// are dropped first. Throws when fewer than 2 rows remain.
double within_sd(const std::vector<double>& column, const std::vector<int>& firm_ids,
                 const std::vector<int>& date_ids, const DemeanConfig& cfg = {});

struct FilterClause {
  enum class Op { ge, le, gt, lt, eq, ne, present };
  std::string column;
  Op op = Op::present;
  double value = 0;
};

struct RegressionSpec {
  std::string name;
  std::string dependent;
  std::vector<std::string> regressors;
  std::vector<std::string> fe_dims;       // e.g. {"firm", "date"}
  std::vector<std::string> cluster_dims;  // e.g. {"ff12", "date"}; 0, 1, or 2 dims
  std::vector<FilterClause> sample_filter;
  bool winsorize_continuous = true;
  double winsor_lower = 0.001;
  double winsor_upper = 0.999;
};

struct DofLedger {
  int n_params = 0;               // slope coefficients
  std::int64_t absorbed_fe = 0;   // absorbed fixed-effect degrees of freedom
  std::vector<std::int64_t> group_counts;      // per fe dim
  std::vector<std::int64_t> singleton_counts;  // per fe dim (groups of size 1, retained)
  std::int64_t n_components = 0;  // connected components of the two-way fe graph
};

struct FitResult {
  std::vector<std::string> terms;
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd std_errors;
  Eigen::VectorXd t_stats;
  Eigen::VectorXd p_values;
  double r_squared = 0;
  std::int64_t n_obs = 0;
  DofLedger dof;
  double within_sd_dependent = kMissing;
  std::vector<std::int64_t> cluster_counts;
  double inference_dof = 0;  // degrees of freedom behind p-values and CIs

  double coefficient(const std::string& term) const;
  double std_error(const std::string& term) const;
  double p_value(const std::string& term) const;
};

// Least squares with absorbed fixed effects: listwise deletion, optional
// winsorization of continuous columns on the estimation sample, demeaning
// over the fe dims, then OLS on the transformed data. Coefficients equal the
// explicit dummy-variable regression's slopes; R-squared is computed against
// the raw dependent with fitted values including the absorbed effects.
FitResult fit_hdfe_ols(const RegressionSpec& spec, const Panel& panel,
                       const DemeanConfig& cfg = {});

// Reference implementation with explicit indicator columns, solved through
// column-pivoted QR on the full design. Guarded to small panels; test oracle.
FitResult ols_dummy_oracle(const RegressionSpec& spec, const Panel& panel,
                           std::int64_t max_rows = 5000);

// Two-way cluster-robust covariance, V_A + V_B - V_{A and B}, each term a
// one-way sandwich with the G/(G-1) * (N-1)/(N-K) correction; symmetrized and
// repaired to PSD by zeroing negative eigenvalues.
Eigen::MatrixXd cluster_cov_cgm(const Eigen::MatrixXd& x_demeaned,
                                const Eigen::VectorXd& residuals,
                                const std::vector<int>& cluster_a,
                                const std::vector<int>& cluster_b, std::int64_t k_total);
Eigen::MatrixXd cluster_cov_oneway(const Eigen::MatrixXd& x_demeaned,
                                   const Eigen::VectorXd& residuals,
                                   const std::vector<int>& clusters, std::int64_t k_total);

struct CorrelationResult {
  std::vector<std::string> names;
  Eigen::MatrixXd r;      // NaN where undefined
  Eigen::MatrixXd p_adj;  // Bonferroni-adjusted two-sided p-values
  Eigen::MatrixXd n;      // pairwise-complete observation counts
};

// Pearson pairwise-complete correlations with Bonferroni adjustment
// (p * number of distinct pairs, capped at 1).
CorrelationResult corr_bonferroni(const std::vector<std::vector<double>>& columns,
                                  const std::vector<std::string>& names);

enum class SignVerdict { pass, fail, insignificant };

struct LabTestEntry {
  std::string finding;   // "I".."IV"
  std::string variable;  // emotion column tested
  std::string target;    // dependent side
  bool demeaned = false;
  int expected_sign = 0;  // +1 or -1
  double correlation = kMissing;
  double p_value = kMissing;
  SignVerdict verdict = SignVerdict::insignificant;
};

struct LabTestReport {
  std::vector<LabTestEntry> entries;
  double alpha = 0.05;
};

// Correlation sign tests mirroring controlled-experiment findings:
//   I   pre-market fear vs open-close return (demeaned, expect negative)
//   II  market fear/anger/happy vs open-close return (demeaned, -/-/+)
//   III pre-market fear and valence vs market cap (raw, +/-)
//   IV  market fear vs dollar volume (demeaned, expect positive)
LabTestReport lab_tests(const Panel& panel, double alpha = 0.05, const DemeanConfig& cfg = {});

}  // namespace emopanel

#include "emopanel/econ.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace emopanel {

void demean_groups(Eigen::MatrixXd& columns, const std::vector<std::vector<int>>& dim_ids,
                   const DemeanConfig& cfg) {
  const Eigen::Index n = columns.rows();
  const Eigen::Index k = columns.cols();
  if (dim_ids.empty()) return;
  if (cfg.tolerance <= 0) throw std::invalid_argument("demean: tolerance must be positive");

  struct Dim {
    const std::vector<int>* ids;
    int groups;
    std::vector<double> count;
  };
  std::vector<Dim> dims;
  for (const auto& ids : dim_ids) {
    if (static_cast<Eigen::Index>(ids.size()) != n)
      throw std::invalid_argument("demean: id vector length mismatch");
    int g = 0;
    for (int id : ids) {
      if (id < 0) throw std::invalid_argument("demean: negative group id");
      g = std::max(g, id + 1);
    }
    Dim d{&ids, g, std::vector<double>(g, 0.0)};
    for (int id : ids) d.count[id] += 1.0;
    dims.push_back(std::move(d));
  }

  std::vector<double> sums;
  auto sweep_dim = [&](const Dim& d) {
    for (Eigen::Index c = 0; c < k; ++c) {
      sums.assign(d.groups, 0.0);
      double* col = columns.col(c).data();
      const std::vector<int>& ids = *d.ids;
      for (Eigen::Index i = 0; i < n; ++i) sums[ids[i]] += col[i];
      for (int g = 0; g < d.groups; ++g) sums[g] /= d.count[g];
      for (Eigen::Index i = 0; i < n; ++i) col[i] -= sums[ids[i]];
    }
  };
  auto worst_group_mean = [&]() {
    double worst = 0.0;
    for (const Dim& d : dims) {
      for (Eigen::Index c = 0; c < k; ++c) {
        sums.assign(d.groups, 0.0);
        const double* col = columns.col(c).data();
        const std::vector<int>& ids = *d.ids;
        for (Eigen::Index i = 0; i < n; ++i) sums[ids[i]] += col[i];
        for (int g = 0; g < d.groups; ++g) worst = std::max(worst, std::abs(sums[g] / d.count[g]));
      }
    }
    return worst;
  };

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    for (const Dim& d : dims) sweep_dim(d);
    if (worst_group_mean() <= cfg.tolerance) return;
  }
  std::ostringstream msg;
  msg << "demean: no convergence after " << cfg.max_iterations
      << " sweeps; worst group mean " << worst_group_mean();
  throw std::runtime_error(msg.str());
}

std::vector<double> demean_two_way(const std::vector<double>& column,
                                   const std::vector<int>& firm_ids,
                                   const std::vector<int>& date_ids, const DemeanConfig& cfg) {
  Eigen::MatrixXd m(column.size(), 1);
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (is_missing(column[i])) throw std::invalid_argument("demean: missing value in column");
    m(static_cast<Eigen::Index>(i), 0) = column[i];
  }
  demean_groups(m, {firm_ids, date_ids}, cfg);
  std::vector<double> out(column.size());
  for (std::size_t i = 0; i < column.size(); ++i) out[i] = m(static_cast<Eigen::Index>(i), 0);
  return out;
}

namespace {

// Dense relabeling that preserves the order of the incoming codes.
std::vector<int> relabel_dense(const std::vector<int>& ids, std::int64_t* group_count = nullptr) {
  std::map<int, int> codes;
  for (int id : ids) codes.emplace(id, 0);
  int next = 0;
  for (auto& [k, v] : codes) v = next++;
  std::vector<int> out(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) out[i] = codes[ids[i]];
  if (group_count) *group_count = next;
  return out;
}

std::int64_t singleton_count(const std::vector<int>& ids) {
  std::vector<std::int64_t> sizes;
  for (int id : ids) {
    if (static_cast<std::size_t>(id) >= sizes.size()) sizes.resize(id + 1, 0);
    ++sizes[id];
  }
  std::int64_t out = 0;
  for (std::int64_t s : sizes)
    if (s == 1) ++out;
  return out;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

double within_sd(const std::vector<double>& column, const std::vector<int>& firm_ids,
                 const std::vector<int>& date_ids, const DemeanConfig& cfg) {
  std::vector<double> vals;
  std::vector<int> f, d;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (is_missing(column[i])) continue;
    vals.push_back(column[i]);
    f.push_back(firm_ids[i]);
    d.push_back(date_ids[i]);
  }
  if (vals.size() < 2) throw std::invalid_argument("within_sd: fewer than 2 rows");
  const auto demeaned = demean_two_way(vals, relabel_dense(f), relabel_dense(d), cfg);
  return sample_sd(demeaned);
}

double FitResult::coefficient(const std::string& term) const {
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (terms[i] == term) return coefficients[static_cast<Eigen::Index>(i)];
  throw std::out_of_range("fit: no term named " + term);
}
double FitResult::std_error(const std::string& term) const {
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (terms[i] == term) return std_errors[static_cast<Eigen::Index>(i)];
  throw std::out_of_range("fit: no term named " + term);
}
double FitResult::p_value(const std::string& term) const {
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (terms[i] == term) return p_values[static_cast<Eigen::Index>(i)];
  throw std::out_of_range("fit: no term named " + term);
}

namespace {

bool clause_passes(const FilterClause& c, double v) {
  if (is_missing(v)) return false;
  switch (c.op) {
    case FilterClause::Op::ge: return v >= c.value;
    case FilterClause::Op::le: return v <= c.value;
    case FilterClause::Op::gt: return v > c.value;
    case FilterClause::Op::lt: return v < c.value;
    case FilterClause::Op::eq: return v == c.value;
    case FilterClause::Op::ne: return v != c.value;
    case FilterClause::Op::present: return true;
  }
  return false;
}

std::vector<std::string> term_factors(const std::string& term) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t star = term.find('*', start);
    if (star == std::string::npos) {
      out.push_back(term.substr(start));
      break;
    }
    out.push_back(term.substr(start, star - start));
    start = star + 1;
  }
  return out;
}

struct PreparedSample {
  std::vector<std::size_t> row_index;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::vector<int>> fe_ids;
  std::vector<std::vector<int>> cluster_ids;
  std::vector<std::int64_t> fe_group_counts;
  std::vector<std::int64_t> fe_singletons;
  std::vector<std::int64_t> cluster_counts;
  std::int64_t n_components = 0;
};

PreparedSample prepare_sample(const RegressionSpec& spec, const Panel& panel) {
  const std::size_t n_all = panel.rows();

  auto require_column = [&](const std::string& name) -> const std::vector<double>& {
    if (!panel.has_column(name))
      throw std::runtime_error("spec '" + spec.name + "': missing column '" + name + "'");
    return panel.column(name);
  };

  // Base columns needed per regressor term (interaction factors resolved).
  std::vector<std::vector<std::string>> factors;
  std::set<std::string> base_names;
  for (const std::string& term : spec.regressors) {
    if (term == spec.dependent)
      throw std::runtime_error("spec '" + spec.name + "': dependent appears among regressors");
    auto f = term_factors(term);
    for (const std::string& b : f) require_column(b);
    base_names.insert(f.begin(), f.end());
    factors.push_back(std::move(f));
  }
  const std::vector<double>& dep = require_column(spec.dependent);

  std::vector<const std::vector<double>*> id_columns;  // per dim that is a panel column
  for (const std::string& dim : spec.fe_dims)
    if (dim != "firm" && dim != "date") require_column(dim);
  for (const std::string& dim : spec.cluster_dims)
    if (dim != "firm" && dim != "date") require_column(dim);
  for (const FilterClause& c : spec.sample_filter) require_column(c.column);

  // Row selection: filters, then listwise deletion over every used column.
  std::vector<std::size_t> rows;
  rows.reserve(n_all);
  for (std::size_t i = 0; i < n_all; ++i) {
    bool ok = !is_missing(dep[i]);
    for (const FilterClause& c : spec.sample_filter)
      ok = ok && clause_passes(c, panel.column(c.column)[i]);
    if (!ok) continue;
    for (const std::string& b : base_names)
      if (is_missing(panel.column(b)[i])) {
        ok = false;
        break;
      }
    if (!ok) continue;
    for (const std::string& dim : spec.fe_dims)
      if (dim != "firm" && dim != "date" && is_missing(panel.column(dim)[i])) {
        ok = false;
        break;
      }
    for (const std::string& dim : spec.cluster_dims)
      if (dim != "firm" && dim != "date" && is_missing(panel.column(dim)[i])) {
        ok = false;
        break;
      }
    if (ok) rows.push_back(i);
  }
  const std::size_t n = rows.size();
  if (n == 0) throw std::runtime_error("spec '" + spec.name + "': empty estimation sample");

  // Winsorize continuous base columns on the estimation sample.
  std::unordered_map<std::string, std::vector<double>> prepared;
  auto prepared_base = [&](const std::string& name) -> const std::vector<double>& {
    auto it = prepared.find(name);
    if (it != prepared.end()) return it->second;
    std::vector<double> vals(n);
    const auto& col = panel.column(name);
    for (std::size_t i = 0; i < n; ++i) vals[i] = col[rows[i]];
    if (spec.winsorize_continuous && panel.meta(name).continuous && n >= 2)
      vals = winsorize(vals, spec.winsor_lower, spec.winsor_upper);
    return prepared.emplace(name, std::move(vals)).first->second;
  };

  PreparedSample out;
  out.row_index = rows;
  const auto& yv = prepared_base(spec.dependent);
  out.y = Eigen::Map<const Eigen::VectorXd>(yv.data(), static_cast<Eigen::Index>(n));
  out.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.regressors.size()));
  for (std::size_t t = 0; t < factors.size(); ++t) {
    Eigen::VectorXd col = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    for (const std::string& b : factors[t]) {
      const auto& vals = prepared_base(b);
      for (std::size_t i = 0; i < n; ++i) col[static_cast<Eigen::Index>(i)] *= vals[i];
    }
    out.x.col(static_cast<Eigen::Index>(t)) = col;
  }

  auto dim_codes = [&](const std::string& dim) {
    std::vector<int> ids(n);
    const auto full = panel.group_ids(dim);
    for (std::size_t i = 0; i < n; ++i) ids[i] = full[rows[i]];
    std::int64_t g = 0;
    ids = relabel_dense(ids, &g);
    return std::make_pair(ids, g);
  };
  for (const std::string& dim : spec.fe_dims) {
    auto [ids, g] = dim_codes(dim);
    out.fe_group_counts.push_back(g);
    out.fe_singletons.push_back(singleton_count(ids));
    out.fe_ids.push_back(std::move(ids));
  }
  for (const std::string& dim : spec.cluster_dims) {
    auto [ids, g] = dim_codes(dim);
    out.cluster_counts.push_back(g);
    out.cluster_ids.push_back(std::move(ids));
  }

  if (out.fe_ids.size() == 2) {
    const int g1 = static_cast<int>(out.fe_group_counts[0]);
    const int g2 = static_cast<int>(out.fe_group_counts[1]);
    UnionFind uf(g1 + g2);
    for (std::size_t i = 0; i < n; ++i) uf.unite(out.fe_ids[0][i], g1 + out.fe_ids[1][i]);
    std::set<int> roots;
    for (std::size_t i = 0; i < n; ++i) roots.insert(uf.find(out.fe_ids[0][i]));
    out.n_components = static_cast<std::int64_t>(roots.size());
  } else if (out.fe_ids.size() == 1) {
    out.n_components = out.fe_group_counts[0];
  }
  return out;
}

std::int64_t absorbed_dof(const PreparedSample& prep) {
  if (prep.fe_ids.empty()) return 0;
  if (prep.fe_ids.size() == 1) return prep.fe_group_counts[0];
  // Two-way: one redundant mean per connected component beyond the first dim.
  return prep.fe_group_counts[0] + prep.fe_group_counts[1] - prep.n_components;
}

Eigen::MatrixXd sandwich_oneway(const Eigen::MatrixXd& x, const Eigen::VectorXd& e,
                                const std::vector<int>& clusters, std::int64_t k_total,
                                const Eigen::MatrixXd& bread) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  int groups = 0;
  for (int c : clusters) groups = std::max(groups, c + 1);
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(groups, k);
  for (Eigen::Index i = 0; i < n; ++i) scores.row(clusters[i]) += e[i] * x.row(i);
  const Eigen::MatrixXd meat = scores.transpose() * scores;
  const double g = static_cast<double>(groups);
  const double denom = std::max<double>(1.0, static_cast<double>(n) - static_cast<double>(k_total));
  const double c = g / (g - 1.0) * (static_cast<double>(n) - 1.0) / denom;
  return c * bread * meat * bread;
}

}  // namespace

Eigen::MatrixXd cluster_cov_oneway(const Eigen::MatrixXd& x_demeaned,
                                   const Eigen::VectorXd& residuals,
                                   const std::vector<int>& clusters, std::int64_t k_total) {
  int groups = 0;
  for (int c : clusters) groups = std::max(groups, c + 1);
  if (groups < 2) throw std::runtime_error("clustered covariance: dimension has a single cluster");
  const Eigen::MatrixXd xtx = x_demeaned.transpose() * x_demeaned;
  const Eigen::MatrixXd bread = xtx.ldlt().solve(
      Eigen::MatrixXd::Identity(x_demeaned.cols(), x_demeaned.cols()));
  return sandwich_oneway(x_demeaned, residuals, clusters, k_total, bread);
}

Eigen::MatrixXd cluster_cov_cgm(const Eigen::MatrixXd& x_demeaned,
                                const Eigen::VectorXd& residuals,
                                const std::vector<int>& cluster_a,
                                const std::vector<int>& cluster_b, std::int64_t k_total) {
  int ga = 0, gb = 0;
  for (int c : cluster_a) ga = std::max(ga, c + 1);
  for (int c : cluster_b) gb = std::max(gb, c + 1);
  if (ga < 2) throw std::runtime_error("clustered covariance: first dimension has a single cluster");
  if (gb < 2)
    throw std::runtime_error("clustered covariance: second dimension has a single cluster");

  const Eigen::MatrixXd xtx = x_demeaned.transpose() * x_demeaned;
  const Eigen::MatrixXd bread = xtx.ldlt().solve(
      Eigen::MatrixXd::Identity(x_demeaned.cols(), x_demeaned.cols()));

  // Intersection partition of the two dimensions.
  std::vector<int> inter(cluster_a.size());
  {
    std::unordered_map<std::int64_t, int> codes;
    for (std::size_t i = 0; i < cluster_a.size(); ++i) {
      const std::int64_t key = static_cast<std::int64_t>(cluster_a[i]) * (gb + 1) + cluster_b[i];
      inter[i] = codes.emplace(key, static_cast<int>(codes.size())).first->second;
    }
  }

  const Eigen::MatrixXd va = sandwich_oneway(x_demeaned, residuals, cluster_a, k_total, bread);
  const Eigen::MatrixXd vb = sandwich_oneway(x_demeaned, residuals, cluster_b, k_total, bread);
  const Eigen::MatrixXd vab = sandwich_oneway(x_demeaned, residuals, inter, k_total, bread);
  Eigen::MatrixXd v = va + vb - vab;
  v = ((v + v.transpose()) / 2.0).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v);
  if (es.info() == Eigen::Success && es.eigenvalues().minCoeff() < 0) {
    const Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(0.0);
    v = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
    v = ((v + v.transpose()) / 2.0).eval();
  }
  return v;
}

FitResult fit_hdfe_ols(const RegressionSpec& spec, const Panel& panel, const DemeanConfig& cfg) {
  PreparedSample prep = prepare_sample(spec, panel);
  const Eigen::Index n = prep.x.rows();
  const Eigen::Index k = prep.x.cols();
  if (k == 0) throw std::runtime_error("spec '" + spec.name + "': no regressors");

  Eigen::MatrixXd m(n, k + 1);
  m.col(0) = prep.y;
  m.rightCols(k) = prep.x;
  if (!prep.fe_ids.empty()) demean_groups(m, prep.fe_ids, cfg);
  const Eigen::VectorXd y_t = m.col(0);
  const Eigen::MatrixXd x_t = m.rightCols(k);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x_t);
  if (qr.rank() < k) {
    // Pivots beyond the numerical rank name the collinear set.
    std::ostringstream msg;
    msg << "spec '" << spec.name << "': rank-deficient regressors after demeaning; collinear set:";
    const auto perm = qr.colsPermutation().indices();
    for (Eigen::Index i = qr.rank(); i < k; ++i) msg << ' ' << spec.regressors[perm[i]];
    throw std::runtime_error(msg.str());
  }
  const Eigen::VectorXd beta = qr.solve(y_t);
  const Eigen::VectorXd resid = y_t - x_t * beta;

  FitResult fit;
  fit.terms = spec.regressors;
  fit.coefficients = beta;
  fit.n_obs = n;
  fit.dof.n_params = static_cast<int>(k);
  fit.dof.absorbed_fe = absorbed_dof(prep);
  fit.dof.group_counts = prep.fe_group_counts;
  fit.dof.singleton_counts = prep.fe_singletons;
  fit.dof.n_components = prep.n_components;
  fit.cluster_counts = prep.cluster_counts;

  const double ybar = prep.y.mean();
  const double sst = (prep.y.array() - ybar).matrix().squaredNorm();
  const double ssr = resid.squaredNorm();
  fit.r_squared = sst > 0 ? 1.0 - ssr / sst : 0.0;

  {
    std::vector<double> yt(y_t.data(), y_t.data() + n);
    fit.within_sd_dependent = sample_sd(yt);
  }

  const std::int64_t k_total = k + fit.dof.absorbed_fe;
  if (prep.cluster_ids.size() == 2) {
    fit.covariance =
        cluster_cov_cgm(x_t, resid, prep.cluster_ids[0], prep.cluster_ids[1], k_total);
    fit.inference_dof =
        static_cast<double>(std::min(prep.cluster_counts[0], prep.cluster_counts[1]) - 1);
  } else if (prep.cluster_ids.size() == 1) {
    fit.covariance = cluster_cov_oneway(x_t, resid, prep.cluster_ids[0], k_total);
    fit.inference_dof = static_cast<double>(prep.cluster_counts[0] - 1);
  } else {
    const double denom = std::max<double>(1.0, static_cast<double>(n - k_total));
    const double sigma2 = ssr / denom;
    const Eigen::MatrixXd xtx = x_t.transpose() * x_t;
    fit.covariance = sigma2 * xtx.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    fit.inference_dof = denom;
  }
  if (fit.inference_dof < 1) fit.inference_dof = 1;

  fit.std_errors = fit.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  fit.t_stats.resize(k);
  fit.p_values.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    fit.t_stats[i] = fit.std_errors[i] > 0 ? beta[i] / fit.std_errors[i] : kMissing;
    fit.p_values[i] = is_missing(fit.t_stats[i]) ? kMissing
                                                 : two_sided_p(fit.t_stats[i], fit.inference_dof);
  }
  return fit;
}

FitResult ols_dummy_oracle(const RegressionSpec& spec, const Panel& panel, std::int64_t max_rows) {
  PreparedSample prep = prepare_sample(spec, panel);
  const Eigen::Index n = prep.x.rows();
  const Eigen::Index k = prep.x.cols();
  if (n > max_rows)
    throw std::runtime_error("ols_dummy_oracle: sample exceeds the " + std::to_string(max_rows) +
                             "-row guard");

  Eigen::Index extra = 1;  // intercept
  for (std::size_t d = 0; d < prep.fe_ids.size(); ++d)
    extra += static_cast<Eigen::Index>(prep.fe_group_counts[d]) - 1;
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(n, k + extra);
  design.leftCols(k) = prep.x;
  Eigen::Index col = k;
  design.col(col++).setOnes();
  for (std::size_t d = 0; d < prep.fe_ids.size(); ++d) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const int g = prep.fe_ids[d][static_cast<std::size_t>(i)];
      if (g > 0) design(i, col + g - 1) = 1.0;
    }
    col += static_cast<Eigen::Index>(prep.fe_group_counts[d]) - 1;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const Eigen::VectorXd full = qr.solve(prep.y);
  const Eigen::VectorXd resid = prep.y - design * full;

  FitResult fit;
  fit.terms = spec.regressors;
  fit.coefficients = full.head(k);
  fit.n_obs = n;
  fit.dof.n_params = static_cast<int>(k);
  fit.dof.absorbed_fe = absorbed_dof(prep);
  fit.dof.group_counts = prep.fe_group_counts;
  fit.dof.singleton_counts = prep.fe_singletons;
  fit.dof.n_components = prep.n_components;
  const double ybar = prep.y.mean();
  const double sst = (prep.y.array() - ybar).matrix().squaredNorm();
  fit.r_squared = sst > 0 ? 1.0 - resid.squaredNorm() / sst : 0.0;
  fit.covariance = Eigen::MatrixXd::Zero(k, k);
  fit.std_errors = Eigen::VectorXd::Zero(k);
  fit.t_stats = Eigen::VectorXd::Constant(k, kMissing);
  fit.p_values = Eigen::VectorXd::Constant(k, kMissing);
  return fit;
}

CorrelationResult corr_bonferroni(const std::vector<std::vector<double>>& columns,
                                  const std::vector<std::string>& names) {
  const std::size_t k = columns.size();
  if (k < 2) throw std::invalid_argument("corr_bonferroni: need at least 2 columns");
  if (names.size() != k) throw std::invalid_argument("corr_bonferroni: name count mismatch");
  CorrelationResult out;
  out.names = names;
  out.r = Eigen::MatrixXd::Constant(k, k, kMissing);
  out.p_adj = Eigen::MatrixXd::Constant(k, k, kMissing);
  out.n = Eigen::MatrixXd::Zero(k, k);
  const double m = static_cast<double>(k * (k - 1) / 2);
  for (std::size_t i = 0; i < k; ++i) {
    out.r(i, i) = 1.0;
    out.p_adj(i, i) = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      const PairCorrelation pc = pearson(columns[i], columns[j]);
      out.n(i, j) = out.n(j, i) = static_cast<double>(pc.n);
      if (is_missing(pc.r)) continue;
      out.r(i, j) = out.r(j, i) = pc.r;
      const double padj = std::min(1.0, pc.p * m);
      out.p_adj(i, j) = out.p_adj(j, i) = padj;
    }
  }
  return out;
}

namespace {

LabTestEntry lab_corr(const Panel& panel, const std::string& finding, const std::string& var,
                      const std::string& target, bool demeaned, int expected_sign, double alpha,
                      const DemeanConfig& cfg) {
  const auto& x = panel.column(var);
  const auto& y = panel.column(target);
  LabTestEntry entry;
  entry.finding = finding;
  entry.variable = var;
  entry.target = target;
  entry.demeaned = demeaned;
  entry.expected_sign = expected_sign;

  std::vector<double> xs, ys;
  std::vector<int> f, d;
  const auto firms = panel.group_ids("firm");
  const auto dates = panel.group_ids("date");
  for (std::size_t i = 0; i < panel.rows(); ++i) {
    if (is_missing(x[i]) || is_missing(y[i])) continue;
    xs.push_back(x[i]);
    ys.push_back(y[i]);
    f.push_back(firms[i]);
    d.push_back(dates[i]);
  }
  if (demeaned && xs.size() >= 2) {
    const auto fd = relabel_dense(f);
    const auto dd = relabel_dense(d);
    xs = demean_two_way(xs, fd, dd, cfg);
    ys = demean_two_way(ys, fd, dd, cfg);
  }
  const PairCorrelation pc = pearson(xs, ys);
  entry.correlation = pc.r;
  entry.p_value = pc.p;
  if (is_missing(pc.p) || pc.p >= alpha)
    entry.verdict = SignVerdict::insignificant;
  else
    entry.verdict = (pc.r > 0 ? 1 : -1) == expected_sign ? SignVerdict::pass : SignVerdict::fail;
  return entry;
}

}  // namespace

LabTestReport lab_tests(const Panel& panel, double alpha, const DemeanConfig& cfg) {
  for (const char* col : {"pre_all_fear", "mkt_all_fear", "mkt_all_anger", "mkt_all_happy",
                          "pre_all_valence", "ret_oc", "mcap_lag1", "dvol"})
    if (!panel.has_column(col))
      throw std::runtime_error(std::string("lab_tests: missing column '") + col + "'");

  LabTestReport report;
  report.alpha = alpha;
  report.entries.push_back(
      lab_corr(panel, "I", "pre_all_fear", "ret_oc", true, -1, alpha, cfg));
  report.entries.push_back(
      lab_corr(panel, "II", "mkt_all_fear", "ret_oc", true, -1, alpha, cfg));
  report.entries.push_back(
      lab_corr(panel, "II", "mkt_all_anger", "ret_oc", true, -1, alpha, cfg));
  report.entries.push_back(
      lab_corr(panel, "II", "mkt_all_happy", "ret_oc", true, +1, alpha, cfg));
  report.entries.push_back(
      lab_corr(panel, "III", "pre_all_fear", "mcap_lag1", false, +1, alpha, cfg));
  report.entries.push_back(
      lab_corr(panel, "III", "pre_all_valence", "mcap_lag1", false, -1, alpha, cfg));
  report.entries.push_back(
      lab_corr(panel, "IV", "mkt_all_fear", "dvol", true, +1, alpha, cfg));
  return report;
}

}  // namespace emopanel

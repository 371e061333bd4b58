#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "emopanel/studies.hpp"

namespace emopanel {

std::string table_id_name(TableId id) {
  switch (id) {
    case TableId::summary_t2: return "T2";
    case TableId::corr_t3: return "T3corr";
    case TableId::labtests_t3: return "T3";
    case TableId::premarket_t4: return "T4";
    case TableId::content_t5: return "T5";
    case TableId::leads_t6: return "T6";
    case TableId::interactions_t7: return "T7";
    case TableId::usertypes_t8: return "T8";
    case TableId::robustness_t9: return "T9";
    case TableId::market_t10: return "T10";
    case TableId::appendix_year_a2: return "A2";
    case TableId::appendix_industry_a3: return "A3";
  }
  return "?";
}

std::optional<TableId> parse_table_id(const std::string& name) {
  for (TableId id : all_table_ids())
    if (table_id_name(id) == name) return id;
  return std::nullopt;
}

std::vector<TableId> all_table_ids() {
  return {TableId::summary_t2,     TableId::corr_t3,       TableId::labtests_t3,
          TableId::premarket_t4,   TableId::content_t5,    TableId::leads_t6,
          TableId::interactions_t7, TableId::usertypes_t8, TableId::robustness_t9,
          TableId::market_t10,     TableId::appendix_year_a2, TableId::appendix_industry_a3};
}

namespace {

// Emotion regressor names for a split prefix, in display order.
std::vector<std::string> emotion_terms(const std::string& prefix) {
  return {prefix + "_happy", prefix + "_sad",   prefix + "_fear",
          prefix + "_disgust", prefix + "_anger", prefix + "_surprise"};
}

std::vector<std::string> base_controls() {
  return {"ret_co", "ret_oc_lag1", "ret_20_1", "vol_183_1"};
}

std::vector<std::string> interaction_controls() {
  return {"ret_co", "ret_oc_lag1", "ret_20_1"};
}

RegressionSpec make_spec(const EconConfig& econ, std::string name, std::string dependent,
                         std::vector<std::string> regressors,
                         std::vector<FilterClause> filters = {}) {
  RegressionSpec spec;
  spec.name = std::move(name);
  spec.dependent = std::move(dependent);
  spec.regressors = std::move(regressors);
  spec.fe_dims = {"firm", "date"};
  spec.cluster_dims = {"ff12", "date"};
  spec.sample_filter = std::move(filters);
  spec.winsorize_continuous = true;
  spec.winsor_lower = econ.winsor_lower;
  spec.winsor_upper = econ.winsor_upper;
  return spec;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

FilterClause present(const std::string& col) {
  return {col, FilterClause::Op::present, 0};
}
FilterClause filter_eq(const std::string& col, double v) {
  return {col, FilterClause::Op::eq, v};
}
FilterClause filter_ge(const std::string& col, double v) {
  return {col, FilterClause::Op::ge, v};
}

struct IvDef {
  const char* name;
  const char* source;
  int percentile;
  DummySide side;
};

constexpr IvDef kIvDefs[] = {
    {"iv_dvol_p25", "dvol_183_1", 25, DummySide::below},
    {"iv_vol_p75", "vol_183_1", 75, DummySide::above},
    {"iv_mcap_p25", "mcap_lag1", 25, DummySide::below},
    {"iv_si_p75", "short_interest", 75, DummySide::above},
    {"iv_io_p25", "inst_own", 25, DummySide::below},
};

}  // namespace

void ensure_derived_columns(Panel& panel) {
  for (const IvDef& def : kIvDefs) {
    if (panel.has_column(def.name) || !panel.has_column(def.source)) continue;
    panel.add_column(def.name, make_percentile_dummy(panel.column(def.source), def.percentile,
                                                     def.side),
                     {"", "dummy", false, false});
  }
}

std::map<std::string, RegressionSpec> spec_catalog(const EconConfig& econ) {
  std::map<std::string, RegressionSpec> out;
  auto add = [&](RegressionSpec spec) { out.emplace(spec.name, std::move(spec)); };

  // Pre-market return regressions and their subsamples.
  add(make_spec(econ, "t4_c1", "ret_oc", base_controls(), {present("pre_all_happy")}));
  add(make_spec(econ, "t4_c2", "ret_oc", concat(emotion_terms("pre_all"), base_controls())));
  add(make_spec(econ, "t4_c3", "ret_oc", concat(emotion_terms("pre_all"), base_controls()),
                {filter_eq("is_index", 1)}));
  add(make_spec(econ, "t4_c4", "ret_oc", concat(emotion_terms("pre_all"), base_controls()),
                {filter_ge("n_pre_all", 100)}));

  add(make_spec(econ, "t5_chat", "ret_oc", concat(emotion_terms("pre_chat"), base_controls())));
  add(make_spec(econ, "t5_fin", "ret_oc", concat(emotion_terms("pre_fin"), base_controls())));
  add(make_spec(econ, "t5_diss", "ret_oc", concat(emotion_terms("pre_diss"), base_controls())));
  add(make_spec(econ, "t5_orig", "ret_oc", concat(emotion_terms("pre_orig"), base_controls())));

  for (int k = 1; k <= 4; ++k) {
    const std::string lead = "lead_ret_oc_" + std::to_string(k);
    add(make_spec(econ, "t6a_lead" + std::to_string(k), lead,
                  concat(emotion_terms("pre_all"), base_controls())));
    add(make_spec(econ, "t6b_lead" + std::to_string(k), lead,
                  concat({"pre_all_valence"}, base_controls())));
  }

  add(make_spec(econ, "t7_c1", "ret_oc",
                concat(emotion_terms("pre_all"), interaction_controls())));
  {
    int idx = 2;
    for (const IvDef& def : kIvDefs) {
      std::vector<std::string> regs = emotion_terms("pre_all");
      for (const std::string& e : emotion_terms("pre_all")) regs.push_back(e + "*" + def.name);
      regs.push_back(def.name);
      add(make_spec(econ, "t7_c" + std::to_string(idx++), "ret_oc",
                    concat(std::move(regs), interaction_controls())));
    }
  }

  for (const char* split : {"amateur", "prof", "fund", "tech", "short", "long"})
    add(make_spec(econ, std::string("t8_") + split, "ret_oc",
                  concat(emotion_terms(std::string("pre_") + split), base_controls())));

  add(make_spec(econ, "t9_c1", "ret_oc", concat(emotion_terms("alt_pre_all"), base_controls())));
  add(make_spec(econ, "t9_c2", "ret_oc", concat(emotion_terms("alt_pre_all"), base_controls()),
                {filter_eq("is_index", 1)}));
  add(make_spec(econ, "t9_c3", "ret_oc", concat(emotion_terms("alt_pre_all"), base_controls()),
                {filter_ge("n_pre_all", 100)}));
  add(make_spec(econ, "t9_c4", "ret_oc", concat(emotion_terms("eqw_pre_all"), base_controls())));
  add(make_spec(econ, "t9_c5", "ret_oc", concat(emotion_terms("eqw_pre_all"), base_controls()),
                {filter_eq("is_index", 1)}));
  add(make_spec(econ, "t9_c6", "ret_oc", concat(emotion_terms("eqw_pre_all"), base_controls()),
                {filter_ge("n_pre_all", 100)}));

  add(make_spec(econ, "t10_c1", "ret_oc", base_controls(), {present("mkt_all_happy")}));
  add(make_spec(econ, "t10_c2", "ret_oc", concat(emotion_terms("mkt_all"), base_controls())));
  add(make_spec(econ, "t10_c3", "ret_oc", concat(emotion_terms("mkt_all"), base_controls()),
                {filter_eq("is_index", 1)}));
  add(make_spec(econ, "t10_c4", "ret_oc", concat(emotion_terms("mkt_all"), base_controls()),
                {filter_ge("n_mkt_all", 100)}));
  return out;
}

namespace {

TableColumn regression_column(const std::string& label, const RegressionSpec& spec, Panel& panel,
                              const EconConfig& econ,
                              const std::vector<std::string>& display_terms) {
  const FitResult fit = fit_hdfe_ols(spec, panel, econ.demean);
  TableColumn col;
  col.label = label;
  col.n_obs = static_cast<double>(fit.n_obs);
  col.r_squared = fit.r_squared;
  col.within_sd = fit.within_sd_dependent;
  for (const std::string& term : display_terms) {
    TableCell cell;
    cell.term = term;
    cell.estimate = fit.coefficient(term);
    cell.se = fit.std_error(term);
    cell.p = fit.p_value(term);
    cell.stars = star_count(cell.p);
    col.cells.push_back(std::move(cell));
  }
  return col;
}

TableArtifact summary_table(Panel& panel, const EconConfig& econ) {
  TableArtifact art;
  art.table_id = "T2";
  art.title = "Summary statistics";
  const auto firm_ids = panel.group_ids("firm");
  const auto date_ids = panel.group_ids("date");
  auto summarize = [&](const std::vector<std::string>& vars, const std::string& label) {
    TablePanelBlock block;
    block.label = label;
    TableColumn col;
    col.label = "summary";
    col.n_obs = static_cast<double>(panel.rows());
    for (const std::string& v : vars) {
      TableCell cell;
      cell.term = v;
      const auto& values = panel.column(v);
      cell.estimate = mean_of(values);
      cell.se = sample_sd(values);
      try {
        cell.aux1 = within_sd(values, firm_ids, date_ids, econ.demean);
      } catch (const std::exception&) {
        cell.aux1 = kMissing;
      }
      col.cells.push_back(std::move(cell));
    }
    block.columns.push_back(std::move(col));
    art.panels.push_back(std::move(block));
  };
  summarize({"pre_all_happy", "pre_all_sad", "pre_all_fear", "pre_all_disgust", "pre_all_anger",
             "pre_all_surprise", "pre_all_neutral"},
            "social_media");
  summarize({"ret_oc", "ret_co", "ret_oc_lag1", "ret_20_1", "dvol_183_1", "vol_183_1",
             "mcap_lag1", "inst_own", "short_interest"},
            "financial");
  return art;
}

TableArtifact corr_table(Panel& panel, const EconConfig& econ) {
  const std::vector<std::string> vars = {"ret_oc",          "pre_all_happy",   "pre_all_sad",
                                         "pre_all_fear",    "pre_all_disgust", "pre_all_anger",
                                         "pre_all_surprise", "pre_all_neutral", "ret_oc_lag1",
                                         "ret_co",          "ret_20_1",        "vol_183_1"};
  std::vector<std::vector<double>> cols;
  for (const std::string& v : vars) {
    if (!panel.has_column(v))
      throw std::runtime_error("study T3corr: missing column '" + v + "'");
    std::vector<double> c = panel.column(v);
    if (panel.meta(v).continuous) c = winsorize(c, econ.winsor_lower, econ.winsor_upper);
    cols.push_back(std::move(c));
  }
  const CorrelationResult corr = corr_bonferroni(cols, vars);

  TableArtifact art;
  art.table_id = "T3corr";
  art.title = "Pairwise correlations (Bonferroni-adjusted)";
  TablePanelBlock block;
  block.label = "correlations";
  for (std::size_t c = 0; c + 1 < vars.size(); ++c) {
    TableColumn col;
    col.label = vars[c];
    col.n_obs = static_cast<double>(panel.rows());
    for (std::size_t r = c + 1; r < vars.size(); ++r) {
      TableCell cell;
      cell.term = vars[r];
      cell.estimate = corr.r(r, c);
      cell.p = corr.p_adj(r, c);
      cell.aux1 = corr.n(r, c);
      cell.stars = star_count(cell.p);
      col.cells.push_back(std::move(cell));
    }
    block.columns.push_back(std::move(col));
  }
  art.panels.push_back(std::move(block));
  return art;
}

TableArtifact labtest_table(Panel& panel, const EconConfig& econ) {
  const LabTestReport report = lab_tests(panel, 0.05, econ.demean);
  TableArtifact art;
  art.table_id = "T3";
  art.title = "Sign tests against laboratory findings";
  TablePanelBlock block;
  block.label = "labtests";
  TableColumn col;
  col.label = "tests";
  col.n_obs = static_cast<double>(panel.rows());
  for (const LabTestEntry& e : report.entries) {
    TableCell cell;
    cell.term = e.finding + " " + e.variable + " vs " + e.target +
                (e.demeaned ? " (demeaned)" : " (raw)");
    cell.estimate = e.correlation;
    cell.p = e.p_value;
    cell.stars = star_count(e.p_value);
    cell.aux1 = e.expected_sign;
    cell.note = e.verdict == SignVerdict::pass
                    ? "pass"
                    : (e.verdict == SignVerdict::fail ? "fail" : "insignificant");
    col.cells.push_back(std::move(cell));
  }
  block.columns.push_back(std::move(col));
  art.panels.push_back(std::move(block));
  return art;
}

TableArtifact appendix_year_table(Panel& panel) {
  std::map<int, std::pair<std::int64_t, double>> by_year;  // firm-days, posts
  const auto& posts = panel.column("n_pre_all");
  for (std::size_t i = 0; i < panel.rows(); ++i) {
    auto& slot = by_year[panel.dates()[i].year()];
    slot.first += 1;
    if (!is_missing(posts[i])) slot.second += posts[i];
  }
  TableArtifact art;
  art.table_id = "A2";
  art.title = "Observations by calendar year";
  TablePanelBlock block;
  block.label = "by_year";
  TableColumn col;
  col.label = "counts";
  col.n_obs = static_cast<double>(panel.rows());
  for (const auto& [year, counts] : by_year) {
    TableCell cell;
    cell.term = std::to_string(year);
    cell.estimate = static_cast<double>(counts.first);
    cell.aux1 = counts.second;
    col.cells.push_back(std::move(cell));
  }
  block.columns.push_back(std::move(col));
  art.panels.push_back(std::move(block));
  return art;
}

const char* ff12_label(int industry) {
  switch (industry) {
    case 1: return "NoDur";
    case 2: return "Durbl";
    case 3: return "Manuf";
    case 4: return "Enrgy";
    case 5: return "Chems";
    case 6: return "BusEq";
    case 7: return "Telcm";
    case 8: return "Utils";
    case 9: return "Shops";
    case 10: return "Hlth";
    case 11: return "Money";
    default: return "Other";
  }
}

TableArtifact appendix_industry_table(Panel& panel) {
  std::array<std::int64_t, 13> firm_days{};
  std::array<double, 13> posts{};
  const auto& ff = panel.column("ff12");
  const auto& n_posts = panel.column("n_pre_all");
  for (std::size_t i = 0; i < panel.rows(); ++i) {
    if (is_missing(ff[i]))
      throw std::runtime_error("study A3: row with missing ff12 code");
    const int code = static_cast<int>(ff[i]);
    firm_days[code] += 1;
    if (!is_missing(n_posts[i])) posts[code] += n_posts[i];
  }
  double post_total = 0;
  std::int64_t fd_total = 0;
  for (int c = 1; c <= 12; ++c) {
    post_total += posts[c];
    fd_total += firm_days[c];
  }
  TableArtifact art;
  art.table_id = "A3";
  art.title = "Observations by industry";
  TablePanelBlock block;
  block.label = "by_industry";
  TableColumn col;
  col.label = "counts";
  col.n_obs = static_cast<double>(panel.rows());
  for (int c = 1; c <= 12; ++c) {
    TableCell cell;
    cell.term = std::string(ff12_label(c));
    cell.estimate = static_cast<double>(firm_days[c]);
    cell.se = fd_total > 0 ? 100.0 * static_cast<double>(firm_days[c]) / fd_total : kMissing;
    cell.aux1 = posts[c];
    cell.aux2 = post_total > 0 ? 100.0 * posts[c] / post_total : kMissing;
    col.cells.push_back(std::move(cell));
  }
  block.columns.push_back(std::move(col));
  art.panels.push_back(std::move(block));
  return art;
}

}  // namespace

TableArtifact run_table(TableId id, Panel& panel, const EconConfig& econ) {
  ensure_derived_columns(panel);
  const auto catalog = spec_catalog(econ);
  auto spec_of = [&](const std::string& name) -> const RegressionSpec& {
    return catalog.at(name);
  };
  auto reg_col = [&](const std::string& label, const std::string& spec_name,
                     const std::vector<std::string>& display) {
    return regression_column(label, spec_of(spec_name), panel, econ, display);
  };

  switch (id) {
    case TableId::summary_t2: return summary_table(panel, econ);
    case TableId::corr_t3: return corr_table(panel, econ);
    case TableId::labtests_t3: return labtest_table(panel, econ);
    case TableId::appendix_year_a2: return appendix_year_table(panel);
    case TableId::appendix_industry_a3: return appendix_industry_table(panel);
    default: break;
  }

  TableArtifact art;
  art.table_id = table_id_name(id);
  if (id == TableId::premarket_t4) {
    art.title = "Pre-market emotions and daily price movements";
    TablePanelBlock block;
    block.label = "main";
    block.columns.push_back(reg_col("controls", "t4_c1", {}));
    block.columns.push_back(reg_col("emotions", "t4_c2", emotion_terms("pre_all")));
    block.columns.push_back(reg_col("index_subsample", "t4_c3", emotion_terms("pre_all")));
    block.columns.push_back(reg_col("min100_subsample", "t4_c4", emotion_terms("pre_all")));
    art.panels.push_back(std::move(block));
  } else if (id == TableId::content_t5) {
    art.title = "Pre-market emotions by message content";
    TablePanelBlock block;
    block.label = "main";
    block.columns.push_back(reg_col("chat", "t5_chat", emotion_terms("pre_chat")));
    block.columns.push_back(reg_col("finance", "t5_fin", emotion_terms("pre_fin")));
    block.columns.push_back(reg_col("disseminating", "t5_diss", emotion_terms("pre_diss")));
    block.columns.push_back(reg_col("original", "t5_orig", emotion_terms("pre_orig")));
    art.panels.push_back(std::move(block));
  } else if (id == TableId::leads_t6) {
    art.title = "Pre-market emotions and subsequent price movements";
    TablePanelBlock granular, combined;
    granular.label = "granular";
    combined.label = "combined";
    for (int k = 1; k <= 4; ++k) {
      const std::string lead = "lead_" + std::to_string(k);
      granular.columns.push_back(
          reg_col(lead, "t6a_lead" + std::to_string(k), emotion_terms("pre_all")));
      combined.columns.push_back(
          reg_col(lead, "t6b_lead" + std::to_string(k), {"pre_all_valence"}));
    }
    art.panels.push_back(std::move(granular));
    art.panels.push_back(std::move(combined));
  } else if (id == TableId::interactions_t7) {
    art.title = "Pre-market emotions interacted with stock characteristics";
    TablePanelBlock block;
    block.label = "main";
    block.columns.push_back(reg_col("none", "t7_c1", emotion_terms("pre_all")));
    const char* labels[] = {"dvol_p25", "vol_p75", "mcap_p25", "short_interest_p75",
                            "inst_own_p25"};
    int idx = 2;
    for (const IvDef& def : kIvDefs) {
      std::vector<std::string> display = emotion_terms("pre_all");
      for (const std::string& e : emotion_terms("pre_all")) display.push_back(e + "*" + def.name);
      display.push_back(def.name);
      block.columns.push_back(
          reg_col(labels[idx - 2], "t7_c" + std::to_string(idx), display));
      ++idx;
    }
    art.panels.push_back(std::move(block));
  } else if (id == TableId::usertypes_t8) {
    art.title = "Pre-market emotions by user type";
    const std::pair<const char*, std::vector<std::pair<const char*, const char*>>> blocks[] = {
        {"experience", {{"amateur", "t8_amateur"}, {"professional", "t8_prof"}}},
        {"approach", {{"fundamental", "t8_fund"}, {"technical", "t8_tech"}}},
        {"horizon", {{"short_term", "t8_short"}, {"long_term", "t8_long"}}},
    };
    const char* prefixes[] = {"pre_amateur", "pre_prof", "pre_fund",
                              "pre_tech",   "pre_short", "pre_long"};
    int pi = 0;
    for (const auto& [label, cols] : blocks) {
      TablePanelBlock block;
      block.label = label;
      for (const auto& [col_label, spec_name] : cols)
        block.columns.push_back(reg_col(col_label, spec_name, emotion_terms(prefixes[pi++])));
      art.panels.push_back(std::move(block));
    }
  } else if (id == TableId::robustness_t9) {
    art.title = "Alternative emotion model and alternative weighting";
    TablePanelBlock alt, eqw;
    alt.label = "alt_model";
    eqw.label = "equal_weight";
    alt.columns.push_back(reg_col("none", "t9_c1", emotion_terms("alt_pre_all")));
    alt.columns.push_back(reg_col("index_subsample", "t9_c2", emotion_terms("alt_pre_all")));
    alt.columns.push_back(reg_col("min100_subsample", "t9_c3", emotion_terms("alt_pre_all")));
    eqw.columns.push_back(reg_col("none", "t9_c4", emotion_terms("eqw_pre_all")));
    eqw.columns.push_back(reg_col("index_subsample", "t9_c5", emotion_terms("eqw_pre_all")));
    eqw.columns.push_back(reg_col("min100_subsample", "t9_c6", emotion_terms("eqw_pre_all")));
    art.panels.push_back(std::move(alt));
    art.panels.push_back(std::move(eqw));
  } else if (id == TableId::market_t10) {
    art.title = "Market-hours emotions and daily price movements";
    TablePanelBlock block;
    block.label = "main";
    block.columns.push_back(reg_col("controls", "t10_c1", {}));
    block.columns.push_back(reg_col("emotions", "t10_c2", emotion_terms("mkt_all")));
    block.columns.push_back(reg_col("index_subsample", "t10_c3", emotion_terms("mkt_all")));
    block.columns.push_back(reg_col("min100_subsample", "t10_c4", emotion_terms("mkt_all")));
    art.panels.push_back(std::move(block));
  } else {
    throw std::logic_error("run_table: unhandled table id");
  }
  return art;
}

std::string schema_signature(const TableArtifact& artifact) {
  std::ostringstream out;
  out << "table=" << artifact.table_id << " panels=" << artifact.panels.size() << "\n";
  for (const TablePanelBlock& block : artifact.panels) {
    out << "panel=" << block.label << " columns=" << block.columns.size() << "\n";
    for (const TableColumn& col : block.columns) {
      out << "column=" << col.label << " terms=" << col.cells.size() << " [";
      for (std::size_t i = 0; i < col.cells.size(); ++i) {
        if (i) out << ',';
        out << col.cells[i].term;
      }
      out << "] n=" << (is_missing(col.n_obs) ? 0 : 1)
          << " r2=" << (is_missing(col.r_squared) ? 0 : 1) << "\n";
    }
  }
  return out.str();
}

}  // namespace emopanel

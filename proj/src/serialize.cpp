#include "forkvol/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "forkvol/errors.hpp"
#include "forkvol/numtext.hpp"

namespace forkvol {

namespace {

std::string fixed(double v, int decimals) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string csv_num(double v) { return std::isnan(v) ? "" : to_decimal(v); }

double num(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

// Renders rows of cells with the first column left-aligned.
std::string render(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    if (width.size() < r.size()) width.resize(r.size(), 0);
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::ostringstream os;
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c > 0) os << "  ";
      os << (c == 0 ? pad_right(r[c], width[c]) : pad_left(r[c], width[c]));
    }
    os << '\n';
  }
  return os.str();
}

const char* display_name(const std::string& name) {
  if (name == "mu") return "mu";
  if (name == "delta_fork_mean") return "delta_fork_mean";
  if (name == "delta_crix") return "delta_CRIX";
  if (name == "omega") return "omega";
  if (name == "alpha") return "alpha";
  if (name == "beta") return "beta";
  if (name == "gamma") return "gamma";
  if (name == "delta_fork_variance") return "delta_fork_variance";
  return name.c_str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Descriptive statistics

Json to_json(const DescriptiveStats& s) {
  return Json{{"n", s.n},
              {"mean", s.mean},
              {"std_dev", s.std_dev},
              {"min", s.min},
              {"max", s.max},
              {"skewness", s.skewness},
              {"excess_kurtosis", s.excess_kurtosis},
              {"jarque_bera", s.jarque_bera},
              {"jb_p_value", s.jb_p_value}};
}

DescriptiveStats descriptive_from_json(const Json& j) {
  DescriptiveStats s;
  s.n = j.at("n").get<std::size_t>();
  s.mean = num(j.at("mean"));
  s.std_dev = num(j.at("std_dev"));
  s.min = num(j.at("min"));
  s.max = num(j.at("max"));
  s.skewness = num(j.at("skewness"));
  s.excess_kurtosis = num(j.at("excess_kurtosis"));
  s.jarque_bera = num(j.at("jarque_bera"));
  s.jb_p_value = num(j.at("jb_p_value"));
  return s;
}

Json to_json(const NamedStats& columns) {
  Json j = Json::object();
  for (const auto& [name, s] : columns) j[name] = to_json(s);
  return j;
}

namespace {

struct StatRow {
  const char* label;
  std::string (*cell)(const DescriptiveStats&);
};

const StatRow kStatRows[] = {
    {"Nb of Obs", [](const DescriptiveStats& s) { return std::to_string(s.n); }},
    {"Mean", [](const DescriptiveStats& s) { return fixed(s.mean, 6); }},
    {"Std Dev", [](const DescriptiveStats& s) { return fixed(s.std_dev, 6); }},
    {"Minimum", [](const DescriptiveStats& s) { return fixed(s.min, 6); }},
    {"Maximum", [](const DescriptiveStats& s) { return fixed(s.max, 6); }},
    {"Skewness", [](const DescriptiveStats& s) { return fixed(s.skewness, 6); }},
    {"Kurtosis", [](const DescriptiveStats& s) { return fixed(s.excess_kurtosis, 6); }},
    {"Jarque_Bera", [](const DescriptiveStats& s) { return fixed(s.jarque_bera, 6); }},
    {"P-value", [](const DescriptiveStats& s) { return fixed(s.jb_p_value, 6); }},
};

}  // namespace

std::string descriptive_text(const NamedStats& columns) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{""};
  for (const auto& c : columns) header.push_back(c.first);
  rows.push_back(header);
  for (const auto& r : kStatRows) {
    std::vector<std::string> line{r.label};
    for (const auto& c : columns) line.push_back(r.cell(c.second));
    rows.push_back(line);
  }
  return render(rows);
}

std::string descriptive_csv(const NamedStats& columns) {
  std::ostringstream os;
  os << "statistic";
  for (const auto& c : columns) os << ',' << c.first;
  os << '\n';
  const std::pair<const char*, double DescriptiveStats::*> fields[] = {
      {"mean", &DescriptiveStats::mean},
      {"std_dev", &DescriptiveStats::std_dev},
      {"min", &DescriptiveStats::min},
      {"max", &DescriptiveStats::max},
      {"skewness", &DescriptiveStats::skewness},
      {"excess_kurtosis", &DescriptiveStats::excess_kurtosis},
      {"jarque_bera", &DescriptiveStats::jarque_bera},
      {"jb_p_value", &DescriptiveStats::jb_p_value}};
  os << "n";
  for (const auto& c : columns) os << ',' << c.second.n;
  os << '\n';
  for (const auto& [label, member] : fields) {
    os << label;
    for (const auto& c : columns) os << ',' << csv_num(c.second.*member);
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Fits

Json to_json(const ModelSpec& spec) {
  return Json{{"include_index", spec.include_index},
              {"dummy_location", std::string(to_string(spec.dummy_location))},
              {"regressor_kind", std::string(to_string(spec.regressor_kind))},
              {"nu", spec.nu},
              {"estimate_nu", spec.estimate_nu},
              {"slug", spec.slug()}};
}

ModelSpec spec_from_json(const Json& j) {
  ModelSpec s;
  s.include_index = j.at("include_index").get<bool>();
  s.dummy_location = parse_dummy_location(j.at("dummy_location").get<std::string>());
  s.regressor_kind = parse_regressor_kind(j.at("regressor_kind").get<std::string>());
  s.nu = num(j.at("nu"));
  s.estimate_nu = j.at("estimate_nu").get<bool>();
  return s;
}

Json to_json(const HypothesisOutcome& h) {
  return Json{{"name", h.name},
              {"coefficient_name", h.coefficient_name},
              {"coefficient", h.coefficient},
              {"t_value", h.t_value},
              {"p_value", h.p_value},
              {"reject_at", h.reject_at}};
}

Json to_json(const FitResult& fit) {
  Json coefficients = Json::array();
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    coefficients.push_back(Json{{"name", fit.names[i]},
                                {"estimate", fit.estimates[i]},
                                {"robust_se", fit.robust_se[i]},
                                {"hessian_se", fit.hessian_se.empty() ? Json() : Json(fit.hessian_se[i])},
                                {"t_value", fit.t_values[i]},
                                {"p_value", fit.p_values[i]}});
  }
  Json hypotheses = Json::array();
  if (fit.spec.dummy_location != DummyLocation::none) {
    for (const auto& h : test_hypotheses(fit)) hypotheses.push_back(to_json(h));
  }
  return Json{{"spec", to_json(fit.spec)},
              {"coefficients", coefficients},
              {"nu", fit.params.nu},
              {"log_likelihood", fit.log_likelihood},
              {"n_obs", fit.n_obs},
              {"free_parameters", fit.free_parameters()},
              {"information_criteria",
               Json{{"akaike", fit.ic.akaike},
                    {"bayes", fit.ic.bayes},
                    {"shibata", fit.ic.shibata},
                    {"hannan_quinn", fit.ic.hannan_quinn}}},
              {"convergence",
               Json{{"converged", fit.convergence.converged},
                    {"iterations", fit.convergence.iterations},
                    {"gradient_norm", fit.convergence.gradient_norm},
                    {"best_start", fit.convergence.best_start},
                    {"successful_starts", fit.convergence.successful_starts},
                    {"beta_at_boundary", fit.convergence.beta_at_boundary}}},
              {"hypotheses", hypotheses}};
}

FitResult fit_from_json(const Json& j) {
  FitResult fit;
  fit.spec = spec_from_json(j.at("spec"));
  for (const auto& c : j.at("coefficients")) {
    fit.names.push_back(c.at("name").get<std::string>());
    fit.estimates.push_back(num(c.at("estimate")));
    fit.robust_se.push_back(num(c.at("robust_se")));
    fit.hessian_se.push_back(num(c.at("hessian_se")));
    fit.t_values.push_back(num(c.at("t_value")));
    fit.p_values.push_back(num(c.at("p_value")));
  }
  ParameterLayout layout(fit.spec);
  if (layout.names() != fit.names) throw InputError("fit JSON: coefficient names do not match the spec");
  fit.params = layout.unpack(fit.estimates);
  fit.params.nu = num(j.at("nu"));
  fit.log_likelihood = num(j.at("log_likelihood"));
  fit.n_obs = j.at("n_obs").get<std::size_t>();
  const auto& ic = j.at("information_criteria");
  fit.ic = {num(ic.at("akaike")), num(ic.at("bayes")), num(ic.at("shibata")), num(ic.at("hannan_quinn"))};
  const auto& c = j.at("convergence");
  fit.convergence.converged = c.at("converged").get<bool>();
  fit.convergence.iterations = c.at("iterations").get<int>();
  fit.convergence.gradient_norm = num(c.at("gradient_norm"));
  fit.convergence.best_start = c.at("best_start").get<int>();
  fit.convergence.successful_starts = c.at("successful_starts").get<int>();
  fit.convergence.beta_at_boundary = c.at("beta_at_boundary").get<bool>();
  return fit;
}

std::string fit_text(const FitResult& fit, const std::string& title) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Parameter", "Estimate", "Std. Error (in %)", "t value", "p value", ""});
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    const double p = fit.p_values[i];
    const std::string stars = p < 0.01 ? "***" : p < 0.05 ? "**" : p < 0.10 ? "*" : "";
    rows.push_back({display_name(fit.names[i]), fixed(fit.estimates[i], 4),
                    fixed(100.0 * fit.robust_se[i], 3), fixed(fit.t_values[i], 3), fixed(p, 3), stars});
  }
  std::ostringstream os;
  if (!title.empty()) os << title << '\n';
  os << "spec: " << fit.spec.slug() << "  nu=" << to_decimal(fit.params.nu) << "  n=" << fit.n_obs
     << "  log-likelihood=" << fixed(fit.log_likelihood, 4) << '\n';
  os << render(rows);
  os << "Akaike " << fixed(fit.ic.akaike, 4) << "  Bayes " << fixed(fit.ic.bayes, 4) << "  Shibata "
     << fixed(fit.ic.shibata, 4) << "  Hannan-Quinn " << fixed(fit.ic.hannan_quinn, 4) << '\n';
  if (!fit.convergence.converged) os << "warning: optimizer did not meet the convergence criteria\n";
  if (fit.convergence.beta_at_boundary) os << "warning: beta is at the stationarity boundary\n";
  return os.str();
}

std::string fit_csv(const FitResult& fit) {
  std::ostringstream os;
  os << "parameter,estimate,robust_se,t_value,p_value\n";
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    os << fit.names[i] << ',' << csv_num(fit.estimates[i]) << ',' << csv_num(fit.robust_se[i]) << ','
       << csv_num(fit.t_values[i]) << ',' << csv_num(fit.p_values[i]) << '\n';
  }
  return os.str();
}

std::string volatility_csv(const VolatilityPath& path) {
  std::ostringstream os;
  os << "date,sigma,z\n";
  for (std::size_t t = 0; t < path.sigma.size(); ++t) {
    os << (path.dates.empty() ? std::to_string(t + 1) : path.dates[t].iso()) << ','
       << to_decimal(path.sigma[t]) << ',' << to_decimal(path.z[t]) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Welch suites

Json to_json(const WelchResult& w) {
  return Json{{"mean_1", w.mean_1},           {"mean_2", w.mean_2},
              {"difference", w.difference},   {"std_error_1", w.std_error_1},
              {"std_error_2", w.std_error_2}, {"t_value", w.t_value},
              {"df", w.df},                   {"p_value", w.p_value},
              {"n_1", w.n_1},                 {"n_2", w.n_2}};
}

WelchResult welch_from_json(const Json& j) {
  WelchResult w;
  w.mean_1 = num(j.at("mean_1"));
  w.mean_2 = num(j.at("mean_2"));
  w.difference = num(j.at("difference"));
  w.std_error_1 = num(j.at("std_error_1"));
  w.std_error_2 = num(j.at("std_error_2"));
  w.t_value = num(j.at("t_value"));
  w.df = num(j.at("df"));
  w.p_value = num(j.at("p_value"));
  w.n_1 = j.at("n_1").get<std::size_t>();
  w.n_2 = j.at("n_2").get<std::size_t>();
  return w;
}

std::string multiplicity_csv(const std::vector<GroupComparison>& rows) {
  std::ostringstream os;
  os << "test,variable_1,variable_2,difference,t_value,p_value,df,mean_1,mean_2,n_1,n_2,note\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    os << i + 1 << ',' << r.label_1 << ',' << r.label_2 << ',';
    if (r.result) {
      const auto& w = *r.result;
      os << csv_num(w.difference) << ',' << csv_num(w.t_value) << ',' << csv_num(w.p_value) << ','
         << csv_num(w.df) << ',' << csv_num(w.mean_1) << ',' << csv_num(w.mean_2) << ',' << w.n_1 << ','
         << w.n_2 << ",\n";
    } else {
      os << ",,,,,,,," << r.note << '\n';
    }
  }
  return os.str();
}

std::string multiplicity_text(const std::vector<GroupComparison>& rows) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Test #", "Variable 1", "Variable 2", "Difference", "t value", "p value"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.result) {
      cells.push_back({std::to_string(i + 1), r.label_1, r.label_2, fixed(r.result->difference, 3),
                       fixed(r.result->t_value, 4), fixed(r.result->p_value, 4)});
    } else {
      cells.push_back({std::to_string(i + 1), r.label_1, r.label_2, "NA", "NA", "NA"});
    }
  }
  return render(cells);
}

std::string delayed_effect_csv(const DelayedEffectTable& table) {
  std::ostringstream os;
  os << "branch,day,n,av_vol,std_error,t_value,p_value,df,note\n";
  for (const auto* b : {&table.no_subsequent, &table.subsequent}) {
    if (!b->available) {
      os << b->name << ",t,,,,,,," << b->note << '\n';
      continue;
    }
    os << b->name << ",t," << b->events << ',' << csv_num(b->event_day_mean) << ','
       << csv_num(b->event_day_std_error) << ",,,,\n";
    for (const auto& row : b->lags) {
      os << b->name << ",t+" << row.lag << ',' << row.n << ',' << csv_num(row.mean) << ','
         << csv_num(row.std_error) << ',';
      if (row.test) {
        os << csv_num(row.test->t_value) << ',' << csv_num(row.test->p_value) << ','
           << csv_num(row.test->df) << ",\n";
      } else {
        os << ",,,unavailable\n";
      }
    }
  }
  return os.str();
}

std::string delayed_effect_text(const DelayedEffectTable& table) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"", "Av. vol.", "Std error", "t value", "p value", "Av. vol.", "Std error",
                   "t value", "p value"});
  auto row_cells = [](const DelayedBranch& b, int lag) -> std::vector<std::string> {
    if (!b.available) return {"NA", "NA", "", ""};
    if (lag == 0) return {fixed(b.event_day_mean, 4), fixed(b.event_day_std_error, 4), "", ""};
    const auto& r = b.lags[static_cast<std::size_t>(lag - 1)];
    if (!r.test) return {fixed(r.mean, 4), "NA", "NA", "NA"};
    return {fixed(r.mean, 4), fixed(r.std_error, 4), fixed(r.test->t_value, 4), fixed(r.test->p_value, 4)};
  };
  for (int lag = 0; lag <= table.horizon; ++lag) {
    std::vector<std::string> line{lag == 0 ? "t" : "t+" + std::to_string(lag)};
    for (const auto& c : row_cells(table.no_subsequent, lag)) line.push_back(c);
    for (const auto& c : row_cells(table.subsequent, lag)) line.push_back(c);
    cells.push_back(line);
  }
  return "columns 2-5: " + table.no_subsequent.name + "; columns 6-9: " + table.subsequent.name +
         "\n" + render(cells);
}

// ---------------------------------------------------------------------------
// Model choice and events

std::string ic_comparison_csv(const InformationCriteria& dummy, const InformationCriteria& count) {
  std::ostringstream os;
  os << "criterion,dummy,count,preferred\n";
  const std::pair<const char*, double InformationCriteria::*> rows[] = {
      {"akaike", &InformationCriteria::akaike},
      {"bayes", &InformationCriteria::bayes},
      {"shibata", &InformationCriteria::shibata},
      {"hannan_quinn", &InformationCriteria::hannan_quinn}};
  for (const auto& [name, member] : rows) {
    const double d = dummy.*member;
    const double c = count.*member;
    os << name << ',' << csv_num(d) << ',' << csv_num(c) << ',' << (d <= c ? "dummy" : "count") << '\n';
  }
  return os.str();
}

std::string ic_comparison_text(const InformationCriteria& dummy, const InformationCriteria& count) {
  return render({{"", "D(t)", "C(t)"},
                 {"Akaike", fixed(dummy.akaike, 4), fixed(count.akaike, 4)},
                 {"Bayes", fixed(dummy.bayes, 4), fixed(count.bayes, 4)},
                 {"Shibata", fixed(dummy.shibata, 4), fixed(count.shibata, 4)},
                 {"Hannan-Quinn", fixed(dummy.hannan_quinn, 4), fixed(count.hannan_quinn, 4)}});
}

std::string regressors_csv(const EventRegressors& r) {
  std::ostringstream os;
  os << "date,dummy,count\n";
  for (std::size_t t = 0; t < r.size(); ++t) {
    os << r.dates[t].iso() << ',' << r.dummy[t] << ',' << r.count[t] << '\n';
  }
  return os.str();
}

std::string clusters_csv(const std::vector<ClusterLabel>& clusters) {
  std::ostringstream os;
  os << "event_date,same_day_count,is_followed\n";
  for (const auto& c : clusters) {
    os << c.event_date.iso() << ',' << c.same_day_count << ',' << (c.is_followed ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace forkvol

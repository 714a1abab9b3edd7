#include "forkvol/estimation.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "forkvol/errors.hpp"
#include "forkvol/optimizer.hpp"

namespace forkvol {

// ---------------------------------------------------------------------------
// ParameterLayout

ParameterLayout::ParameterLayout(const ModelSpec& spec) : spec_(spec) {
  names_.push_back("mu");
  if (spec.dummy_location == DummyLocation::mean) names_.push_back("delta_fork_mean");
  if (spec.include_index) names_.push_back("delta_crix");
  names_.insert(names_.end(), {"omega", "alpha", "beta", "gamma"});
  if (spec.dummy_location == DummyLocation::variance) names_.push_back("delta_fork_variance");
  if (spec.estimate_nu) names_.push_back("nu");
}

std::optional<std::size_t> ParameterLayout::index_of(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::vector<double> ParameterLayout::pack(const ParameterSet& p) const {
  std::vector<double> out;
  out.reserve(names_.size());
  for (const auto& name : names_) {
    if (name == "mu") out.push_back(p.mu);
    else if (name == "delta_fork_mean") out.push_back(p.delta_fork_mean.value_or(0.0));
    else if (name == "delta_crix") out.push_back(p.delta_crix.value_or(0.0));
    else if (name == "omega") out.push_back(p.omega);
    else if (name == "alpha") out.push_back(p.alpha);
    else if (name == "beta") out.push_back(p.beta);
    else if (name == "gamma") out.push_back(p.gamma);
    else if (name == "delta_fork_variance") out.push_back(p.delta_fork_variance.value_or(0.0));
    else if (name == "nu") out.push_back(p.nu);
  }
  return out;
}

ParameterSet ParameterLayout::unpack(std::span<const double> natural) const {
  if (natural.size() != names_.size()) throw UsageError("parameter vector has the wrong length");
  ParameterSet p = ParameterSet::for_spec(spec_);
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const auto& name = names_[i];
    const double v = natural[i];
    if (name == "mu") p.mu = v;
    else if (name == "delta_fork_mean") p.delta_fork_mean = v;
    else if (name == "delta_crix") p.delta_crix = v;
    else if (name == "omega") p.omega = v;
    else if (name == "alpha") p.alpha = v;
    else if (name == "beta") p.beta = v;
    else if (name == "gamma") p.gamma = v;
    else if (name == "delta_fork_variance") p.delta_fork_variance = v;
    else if (name == "nu") p.nu = v;
  }
  return p;
}

std::vector<double> ParameterLayout::to_unconstrained(std::span<const double> natural) const {
  std::vector<double> out(natural.begin(), natural.end());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == "beta") out[i] = std::atanh(natural[i]);
    if (names_[i] == "nu") out[i] = std::log(natural[i] - 2.0);
  }
  return out;
}

std::vector<double> ParameterLayout::to_natural(std::span<const double> free) const {
  std::vector<double> out(free.begin(), free.end());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == "beta") out[i] = std::tanh(free[i]);
    if (names_[i] == "nu") out[i] = 2.0 + std::exp(free[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Criteria and tests

InformationCriteria information_criteria(double log_likelihood, std::size_t k, std::size_t n) {
  if (!(n > 2 * k)) throw UsageError("information_criteria: need n > 2k");
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  const double dev = -2.0 * log_likelihood;
  InformationCriteria ic;
  ic.akaike = (dev + 2.0 * kk) / nn;
  ic.bayes = (dev + kk * std::log(nn)) / nn;
  ic.shibata = (dev + nn * std::log((nn + 2.0 * kk) / nn)) / nn;
  ic.hannan_quinn = (dev + 2.0 * kk * std::log(std::log(nn))) / nn;
  return ic;
}

double two_sided_p_value(double t, double df) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (t == 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t dist(df);
  const double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return std::clamp(p, 0.0, 1.0);
}

std::vector<double> rejection_levels(double p_value) {
  std::vector<double> out;
  for (double level : {0.10, 0.05, 0.01}) {
    if (p_value < level) out.push_back(level);
  }
  return out;
}

std::optional<std::size_t> FitResult::index_of(std::string_view name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

std::vector<HypothesisOutcome> test_hypotheses(const FitResult& fit) {
  std::vector<HypothesisOutcome> out;
  const std::pair<const char*, const char*> tests[] = {{"H1_mean", "delta_fork_mean"},
                                                       {"H2_variance", "delta_fork_variance"}};
  for (const auto& [hypothesis, coefficient] : tests) {
    const auto idx = fit.index_of(coefficient);
    if (!idx) continue;
    HypothesisOutcome h;
    h.name = hypothesis;
    h.coefficient_name = coefficient;
    h.coefficient = fit.estimates[*idx];
    h.t_value = fit.t_values[*idx];
    h.p_value = fit.p_values[*idx];
    h.reject_at = rejection_levels(h.p_value);
    out.push_back(std::move(h));
  }
  if (out.empty()) throw UsageError("test_hypotheses: the fitted model has no event coefficient");
  return out;
}

// ---------------------------------------------------------------------------
// Sandwich covariance

SandwichResult sandwich_covariance(const VectorFunction& per_observation_log_lik,
                                   std::span<const double> theta) {
  const auto steps = central_steps(theta);
  const auto base = per_observation_log_lik(theta);
  const double n = static_cast<double>(base.size());
  if (base.empty()) throw EstimationError("sandwich: no observations");

  const ScalarFunction mean_log_lik = [&](std::span<const double> x) {
    const auto terms = per_observation_log_lik(x);
    double sum = 0.0;
    for (double v : terms) sum += v;
    return sum / static_cast<double>(terms.size());
  };

  SandwichResult out;
  out.hessian = central_hessian(mean_log_lik, theta, steps);
  const Eigen::MatrixXd scores = central_jacobian(per_observation_log_lik, theta, steps);
  out.outer_product = scores.transpose() * scores / n;
  if (!out.hessian.allFinite() || !out.outer_product.allFinite()) {
    throw EstimationError("sandwich: non-finite Hessian or scores");
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(out.hessian);
  if (!lu.isInvertible()) {
    throw EstimationError(
        "Hessian is not invertible; a parameter may sit on a boundary or be unidentified");
  }
  const Eigen::MatrixXd hinv = lu.inverse();
  Eigen::MatrixXd cov = hinv * out.outer_product * hinv / n;
  out.covariance = 0.5 * (cov + cov.transpose());

  const auto k = theta.size();
  out.robust_se.resize(k);
  out.hessian_se.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double v = out.covariance(ii, ii);
    if (!(v > 0.0)) throw EstimationError("sandwich: non-positive variance for parameter " + std::to_string(i));
    out.robust_se[i] = std::sqrt(v);
    const double hv = -hinv(ii, ii) / n;
    out.hessian_se[i] = hv > 0.0 ? std::sqrt(hv) : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

SandwichResult robust_se(const ModelData& data, const ModelSpec& spec,
                         std::span<const double> theta, VarianceSeed seed) {
  const ParameterLayout layout(spec);
  const VectorFunction terms = [&](std::span<const double> x) {
    try {
      return filter(data, layout.unpack(x), spec, seed).log_lik_terms;
    } catch (const UsageError& e) {
      throw EstimationError(std::string("robust_se: perturbed parameters invalid: ") + e.what());
    }
  };
  return sandwich_covariance(terms, theta);
}

// ---------------------------------------------------------------------------
// Fitting

std::vector<ParameterSet> start_values(const ModelData& data, const ModelSpec& spec, int starts) {
  const std::size_t n = data.size();
  const double nn = static_cast<double>(n);
  double mean_r = 0.0;
  for (double r : data.returns) mean_r += r;
  mean_r /= nn;

  double slope = 0.0;
  double mu0 = mean_r;
  if (spec.include_index) {
    double mean_x = 0.0;
    for (double x : data.index_returns) mean_x += x;
    mean_x /= nn;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      sxy += (data.index_returns[t] - mean_x) * (data.returns[t] - mean_r);
      sxx += (data.index_returns[t] - mean_x) * (data.index_returns[t] - mean_x);
    }
    slope = sxx > 0.0 ? sxy / sxx : 0.0;
    mu0 = mean_r - slope * mean_x;
  }
  double ss = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double e = data.returns[t] - mu0 - (spec.include_index ? slope * data.index_returns[t] : 0.0);
    ss += e * e;
  }
  const double log_var = std::log(std::max(ss / (nn - 1.0), 1e-300));

  struct Shape {
    double beta, alpha, gamma;
  };
  static constexpr Shape kGrid[] = {
      {0.90, 0.05, 0.10}, {0.95, 0.10, 0.05}, {0.80, 0.10, 0.00}, {0.97, 0.05, 0.20}, {0.60, 0.20, 0.10}};
  std::vector<ParameterSet> out;
  for (int k = 0; k < starts; ++k) {
    Shape s = kGrid[k % 5];
    if (k >= 5) s.beta = std::min(0.99, s.beta + 0.01 * static_cast<double>(k / 5));
    ParameterSet p = ParameterSet::for_spec(spec);
    p.mu = mu0;
    if (spec.include_index) p.delta_crix = slope;
    p.beta = s.beta;
    p.alpha = s.alpha;
    p.gamma = s.gamma;
    p.omega = (1.0 - s.beta) * log_var;
    out.push_back(p);
  }
  return out;
}

namespace {

std::string describe_attempts(const std::vector<OptimizerResult>& runs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    os << "start " << i << ": objective=" << runs[i].value << " iterations=" << runs[i].iterations
       << " gradient_norm=" << runs[i].gradient_norm << " status=" << runs[i].message << '\n';
  }
  return os.str();
}

}  // namespace

FitResult fit(const ModelData& data, const ModelSpec& spec, const FitOptions& options) {
  spec.validate();
  const std::size_t n = data.size();
  if (n < options.min_observations) {
    throw InputError("fit: need at least " + std::to_string(options.min_observations) +
                     " observations, got " + std::to_string(n));
  }
  const ParameterLayout layout(spec);
  const double nn = static_cast<double>(n);

  const ScalarFunction objective = [&](std::span<const double> free) {
    const auto natural = layout.to_natural(free);
    for (double v : natural) {
      if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    }
    const double ll = log_likelihood(data, layout.unpack(natural), spec, options.seed);
    return std::isfinite(ll) ? -ll / nn : std::numeric_limits<double>::infinity();
  };

  OptimizerOptions opt;
  opt.max_iterations = options.max_iterations;
  opt.relative_tolerance = options.relative_tolerance;
  opt.gradient_tolerance = options.gradient_tolerance;

  const auto starts = start_values(data, spec, std::max(1, options.starts));
  std::vector<OptimizerResult> runs(starts.size());
  auto run_start = [&](std::size_t i) {
    return minimize_bfgs(objective, layout.to_unconstrained(layout.pack(starts[i])), opt);
  };
  if (options.parallel_starts) {
    std::vector<std::future<OptimizerResult>> pending;
    for (std::size_t i = 0; i < starts.size(); ++i) pending.push_back(std::async(std::launch::async, run_start, i));
    for (std::size_t i = 0; i < starts.size(); ++i) runs[i] = pending[i].get();
  } else {
    for (std::size_t i = 0; i < starts.size(); ++i) runs[i] = run_start(i);
  }

  int best = -1;
  int successful = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].converged) ++successful;
    if (!std::isfinite(runs[i].value)) continue;
    if (best < 0 || runs[i].value < runs[static_cast<std::size_t>(best)].value) best = static_cast<int>(i);
  }
  if (best < 0) {
    throw EstimationError("fit: the likelihood could not be evaluated from any start",
                          describe_attempts(runs));
  }
  const auto& chosen = runs[static_cast<std::size_t>(best)];
  const OptimizerResult polished = polish_newton(objective, chosen, opt);
  const bool converged = polished.converged || chosen.converged;
  if (!converged && successful == 0) {
    throw EstimationError("fit: no start converged", describe_attempts(runs) + "polish: gradient_norm=" +
                                                         std::to_string(polished.gradient_norm) + '\n');
  }

  FitResult result;
  result.spec = spec;
  result.names = layout.names();
  result.estimates = layout.to_natural(polished.x);
  result.params = layout.unpack(result.estimates);
  result.n_obs = n;

  const auto sandwich = robust_se(data, spec, result.estimates, options.seed);
  result.robust_se = sandwich.robust_se;
  result.hessian_se = sandwich.hessian_se;

  const double df = nn - static_cast<double>(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const double t = result.estimates[i] / result.robust_se[i];
    result.t_values.push_back(t);
    result.p_values.push_back(two_sided_p_value(t, df));
  }

  const FilterResult filtered = filter(data, result.params, spec, options.seed);
  result.log_likelihood = filtered.log_likelihood;
  result.sigma_path = filtered.path;
  result.ic = information_criteria(result.log_likelihood, layout.size(), n);

  result.convergence.converged = converged;
  result.convergence.iterations = polished.iterations;
  result.convergence.gradient_norm = polished.gradient_norm;
  result.convergence.best_start = best;
  result.convergence.successful_starts = successful;
  if (const auto b = layout.index_of("beta")) {
    result.convergence.beta_at_boundary = std::abs(polished.x[*b]) > 7.0;
  }
  return result;
}

}  // namespace forkvol

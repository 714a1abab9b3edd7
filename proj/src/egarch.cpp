#include "forkvol/egarch.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "forkvol/errors.hpp"

namespace forkvol {

std::string_view to_string(DummyLocation loc) {
  switch (loc) {
    case DummyLocation::none: return "none";
    case DummyLocation::mean: return "mean";
    case DummyLocation::variance: return "variance";
  }
  return "none";
}

DummyLocation parse_dummy_location(std::string_view text) {
  if (text == "none") return DummyLocation::none;
  if (text == "mean") return DummyLocation::mean;
  if (text == "variance") return DummyLocation::variance;
  throw UsageError("unknown dummy location '" + std::string(text) + "' (expected none|mean|variance)");
}

void ModelSpec::validate() const {
  if (regressor_kind == RegressorKind::count && dummy_location != DummyLocation::variance) {
    throw UsageError("count regressor is only valid in the variance equation");
  }
  if (!(nu > 2.0) || !std::isfinite(nu)) throw UsageError("nu must be a finite value > 2");
}

std::string ModelSpec::slug() const {
  std::string s;
  if (dummy_location == DummyLocation::none) {
    s = "nodummy";
  } else {
    s = std::string(to_string(dummy_location)) + "_" + std::string(to_string(regressor_kind));
  }
  s += include_index ? "_index" : "_noindex";
  if (estimate_nu) s += "_nu";
  return s;
}

ParameterSet ParameterSet::for_spec(const ModelSpec& spec) {
  ParameterSet p;
  if (spec.dummy_location == DummyLocation::mean) p.delta_fork_mean = 0.0;
  if (spec.include_index) p.delta_crix = 0.0;
  if (spec.dummy_location == DummyLocation::variance) p.delta_fork_variance = 0.0;
  p.nu = spec.nu;
  return p;
}

void ParameterSet::validate(const ModelSpec& spec) const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(mu) || !finite(omega) || !finite(alpha) || !finite(gamma) || !finite(beta)) {
    throw UsageError("parameters must be finite");
  }
  if (!(std::abs(beta) < 1.0)) throw UsageError("|beta| must be < 1");
  if (!(nu > 2.0) || !finite(nu)) throw UsageError("nu must be a finite value > 2");
  if (delta_fork_mean.has_value() != (spec.dummy_location == DummyLocation::mean)) {
    throw UsageError("delta_fork_mean must be present exactly when the dummy is in the mean");
  }
  if (delta_fork_variance.has_value() != (spec.dummy_location == DummyLocation::variance)) {
    throw UsageError("delta_fork_variance must be present exactly when the dummy is in the variance");
  }
  if (delta_crix.has_value() != spec.include_index) {
    throw UsageError("delta_crix must be present exactly when the index is included");
  }
  for (const auto& d : {delta_fork_mean, delta_crix, delta_fork_variance}) {
    if (d && !finite(*d)) throw UsageError("parameters must be finite");
  }
}

double expected_abs_z(double nu) {
  if (!(nu > 2.0)) throw UsageError("expected_abs_z: nu must be > 2");
  using boost::math::lgamma;
  const double log_ratio = lgamma((nu + 1.0) / 2.0) - lgamma(nu / 2.0);
  return 2.0 * std::sqrt(nu - 2.0) * std::exp(log_ratio) / (std::sqrt(std::numbers::pi) * (nu - 1.0));
}

namespace {

double log_density_constant(double nu) {
  using boost::math::lgamma;
  return lgamma((nu + 1.0) / 2.0) - lgamma(nu / 2.0) - 0.5 * std::log(std::numbers::pi * (nu - 2.0));
}

// Everything the recursion needs, resolved once per evaluation.
struct Recursion {
  double mu, d_mean, d_index, omega, alpha, gamma, beta, d_var, nu;
  double abs_mean;
  double density_const;
  bool event_in_mean;
  bool event_in_variance;
  bool with_index;

  Recursion(const ParameterSet& p, const ModelSpec& spec)
      : mu(p.mu),
        d_mean(p.delta_fork_mean.value_or(0.0)),
        d_index(p.delta_crix.value_or(0.0)),
        omega(p.omega),
        alpha(p.alpha),
        gamma(p.gamma),
        beta(p.beta),
        d_var(p.delta_fork_variance.value_or(0.0)),
        nu(p.nu),
        abs_mean(expected_abs_z(p.nu)),
        density_const(log_density_constant(p.nu)),
        event_in_mean(spec.dummy_location == DummyLocation::mean),
        event_in_variance(spec.dummy_location == DummyLocation::variance),
        with_index(spec.include_index) {}

  double mean(double event, double index) const {
    double m = mu;
    if (event_in_mean) m += d_mean * event;
    if (with_index) m += d_index * index;
    return m;
  }

  // The pre-sample shock is neutral, so both shock terms vanish at t = 0.
  double next_log_variance(double h_prev, double z_prev, double event, bool first) const {
    double h = omega + beta * h_prev;
    if (!first) h += alpha * (std::abs(z_prev) - abs_mean) + gamma * z_prev;
    if (event_in_variance) h += d_var * event;
    return h;
  }

  double log_lik_term(double z, double h) const {
    return density_const - 0.5 * (nu + 1.0) * std::log1p(z * z / (nu - 2.0)) - 0.5 * h;
  }

  double unconditional_log_variance() const { return omega / (1.0 - beta); }
};

double at(const std::vector<double>& v, std::size_t t) { return v.empty() ? 0.0 : v[t]; }

double sample_seed(const std::vector<double>& eps) {
  double sum = 0.0;
  for (double e : eps) sum += e * e;
  return std::log(sum / static_cast<double>(eps.size()));
}

template <bool KeepPaths>
bool run_filter(const ModelData& data, const Recursion& rec, VarianceSeed seed, FilterResult* out,
                std::size_t* bad_index) {
  const std::size_t n = data.size();
  double h_prev = 0.0;
  if (seed == VarianceSeed::sample) {
    double sum = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double e = data.returns[t] - rec.mean(at(data.event_regressor, t), at(data.index_returns, t));
      sum += e * e;
    }
    h_prev = std::log(sum / static_cast<double>(n));
  } else {
    h_prev = rec.unconditional_log_variance();
  }
  if (!std::isfinite(h_prev)) {
    *bad_index = 0;
    return false;
  }
  out->initial_log_variance = h_prev;

  double z_prev = 0.0;
  double total = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double event = at(data.event_regressor, t);
    const double h = rec.next_log_variance(h_prev, z_prev, event, t == 0);
    const double sigma = std::exp(0.5 * h);
    const double eps = data.returns[t] - rec.mean(event, at(data.index_returns, t));
    const double z = eps / sigma;
    const double ll = rec.log_lik_term(z, h);
    if (!std::isfinite(ll) || !(sigma > 0.0) || !std::isfinite(sigma)) {
      *bad_index = t;
      return false;
    }
    if constexpr (KeepPaths) {
      out->path.sigma[t] = sigma;
      out->path.z[t] = z;
      out->log_lik_terms[t] = ll;
    }
    total += ll;
    h_prev = h;
    z_prev = z;
  }
  out->log_likelihood = total;
  return true;
}

void check_data(const ModelData& data, const ModelSpec& spec) {
  const std::size_t n = data.size();
  if (n == 0) throw InputError("model data is empty");
  if (!data.dates.empty() && data.dates.size() != n) throw InputError("model data: date axis length mismatch");
  if (spec.include_index && data.index_returns.size() != n) {
    throw InputError("model data: index returns missing or misaligned");
  }
  if (spec.dummy_location != DummyLocation::none && data.event_regressor.size() != n) {
    throw InputError("model data: event regressor missing or misaligned");
  }
}

}  // namespace

double std_t_log_density(double z, double nu) {
  if (!(nu > 2.0)) throw UsageError("std_t_log_density: nu must be > 2");
  return log_density_constant(nu) - 0.5 * (nu + 1.0) * std::log1p(z * z / (nu - 2.0));
}

ModelData make_model_data(const ReturnSeries& returns, const ReturnSeries* index_returns,
                          const EventRegressors& regressors, const ModelSpec& spec) {
  spec.validate();
  if (returns.dates.size() != returns.values.size()) throw InputError("return series dates/values mismatch");
  ModelData data;
  data.dates = returns.dates;
  data.returns = returns.values;
  if (spec.include_index) {
    if (!index_returns) throw InputError("spec includes the index but no index returns were given");
    if (index_returns->dates != returns.dates) {
      throw InputError("index returns are not aligned with asset returns");
    }
    data.index_returns = index_returns->values;
  }
  if (spec.dummy_location != DummyLocation::none) {
    if (regressors.dates != returns.dates) {
      throw InputError("event regressors are not aligned with asset returns");
    }
    data.event_regressor = regressors.as_real(spec.regressor_kind);
  }
  return data;
}

FilterResult filter(const ModelData& data, const ParameterSet& params, const ModelSpec& spec,
                    VarianceSeed seed) {
  spec.validate();
  params.validate(spec);
  check_data(data, spec);
  const Recursion rec(params, spec);

  const std::size_t n = data.size();
  FilterResult out;
  out.path.dates = data.dates;
  out.path.sigma.resize(n);
  out.path.z.resize(n);
  out.log_lik_terms.resize(n);
  std::size_t bad = 0;
  if (!run_filter<true>(data, rec, seed, &out, &bad)) {
    const std::string when = data.dates.empty() ? "observation " + std::to_string(bad + 1)
                                                : data.dates[bad].iso();
    throw EstimationError("non-finite conditional variance or likelihood on " + when);
  }
  return out;
}

double log_likelihood(const ModelData& data, const ParameterSet& params, const ModelSpec& spec,
                      VarianceSeed seed) {
  check_data(data, spec);
  if (!(std::abs(params.beta) < 1.0) || !(params.nu > 2.0)) {
    return -std::numeric_limits<double>::infinity();
  }
  const Recursion rec(params, spec);
  FilterResult scratch;
  std::size_t bad = 0;
  if (!run_filter<false>(data, rec, seed, &scratch, &bad)) {
    return -std::numeric_limits<double>::infinity();
  }
  return scratch.log_likelihood;
}

std::vector<double> draw_standardized_t(std::size_t n, double nu, std::uint64_t seed) {
  if (!(nu > 2.0)) throw UsageError("draw_standardized_t: nu must be > 2");
  std::mt19937_64 gen(seed);
  std::student_t_distribution<double> dist(nu);
  const double scale = std::sqrt((nu - 2.0) / nu);
  std::vector<double> z(n);
  for (auto& v : z) v = dist(gen) * scale;
  return z;
}

SimulationResult simulate(const ParameterSet& params, const ModelSpec& spec,
                          const EventRegressors& regressors,
                          std::span<const double> index_returns, std::size_t horizon,
                          std::uint64_t seed) {
  spec.validate();
  params.validate(spec);
  if (horizon < 1) throw UsageError("simulate: horizon must be >= 1");

  std::vector<Date> dates;
  std::vector<double> event;
  if (regressors.dates.empty()) {
    const Date start = Date::from_ymd(2015, 1, 1);
    dates.reserve(horizon);
    for (std::size_t t = 0; t < horizon; ++t) dates.push_back(start.plus_days(static_cast<std::int32_t>(t)));
    event.assign(horizon, 0.0);
  } else {
    if (regressors.size() != horizon) throw UsageError("simulate: regressors do not match the horizon");
    dates = regressors.dates;
    event = regressors.as_real(spec.regressor_kind);
  }
  std::vector<double> index;
  if (spec.include_index) {
    if (index_returns.size() != horizon) throw UsageError("simulate: index returns do not match the horizon");
    index.assign(index_returns.begin(), index_returns.end());
  }
  if (spec.dummy_location == DummyLocation::none) event.clear();

  const Recursion rec(params, spec);
  const std::vector<double> draws = draw_standardized_t(horizon, params.nu, seed);

  std::vector<double> h(horizon), returns(horizon), eps(horizon), sigma(horizon), z(horizon);
  // Generates the path from a pre-sample log variance and returns the value
  // the sample seed rule would assign to the generated returns.
  auto run = [&](double h0) {
    double h_prev = h0, z_prev = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
      const double x = at(event, t);
      h[t] = rec.next_log_variance(h_prev, z_prev, x, t == 0);
      sigma[t] = std::exp(0.5 * h[t]);
      const double m = rec.mean(x, at(index, t));
      returns[t] = m + sigma[t] * draws[t];
      eps[t] = returns[t] - rec.mean(x, at(index, t));
      z[t] = eps[t] / sigma[t];
      h_prev = h[t];
      z_prev = z[t];
    }
    const double next = sample_seed(eps);
    if (!std::isfinite(next)) throw UsageError("simulate: parameters produce a divergent variance path");
    return next;
  };

  // Solve h0 = seed(h0): Aitken-accelerated iteration, then exact polishing.
  double h0 = rec.unconditional_log_variance();
  if (rec.event_in_variance && !event.empty()) {
    double mean_event = 0.0;
    for (double x : event) mean_event += x;
    h0 += rec.d_var * mean_event / static_cast<double>(horizon) / (1.0 - rec.beta);
  }
  bool exact = false;
  for (int k = 0; k < 200 && !exact; ++k) {
    const double f1 = run(h0);
    if (f1 == h0) {
      exact = true;
      break;
    }
    const double f2 = run(f1);
    if (f2 == f1) {
      h0 = f1;
      exact = true;
      break;
    }
    const double denom = f2 - 2.0 * f1 + h0;
    double next = denom != 0.0 ? h0 - (f1 - h0) * (f1 - h0) / denom : f2;
    if (!std::isfinite(next)) next = f2;
    const bool close = std::abs(next - f2) <= 1e-13 * std::max(1.0, std::abs(f2));
    h0 = next;
    if (close) break;
  }
  for (int k = 0; k < 64 && !exact; ++k) {
    const double f = run(h0);
    if (f == h0) {
      exact = true;
    } else {
      h0 = f;
    }
  }
  if (!exact) {
    // Plain iteration can cycle in the last bits; look for a neighbouring fixed point.
    double best = h0;
    double best_gap = std::abs(run(h0) - h0);
    double up = h0, down = h0;
    for (int k = 0; k < 64 && !exact; ++k) {
      up = std::nextafter(up, std::numeric_limits<double>::infinity());
      down = std::nextafter(down, -std::numeric_limits<double>::infinity());
      for (double cand : {up, down}) {
        const double gap = std::abs(run(cand) - cand);
        if (gap == 0.0) {
          best = cand;
          exact = true;
          break;
        }
        if (gap < best_gap) {
          best_gap = gap;
          best = cand;
        }
      }
    }
    h0 = best;
  }
  run(h0);

  SimulationResult out;
  out.returns.dates = dates;
  out.returns.values = returns;
  out.path.dates = std::move(dates);
  out.path.sigma = std::move(sigma);
  out.path.z = std::move(z);
  out.initial_log_variance = h0;
  out.seed_consistent = exact;
  return out;
}

}  // namespace forkvol

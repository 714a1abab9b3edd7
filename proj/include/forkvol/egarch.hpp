#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forkvol/date.hpp"
#include "forkvol/events.hpp"
#include "forkvol/timeseries.hpp"

namespace forkvol {

/// Where the event regressor enters the model.
enum class DummyLocation { none, mean, variance };

std::string_view to_string(DummyLocation loc);
DummyLocation parse_dummy_location(std::string_view text);

/// EGARCH(1,1) with standardized Student-t innovations:
///
///   R(t)        = mu + d_mean x(t) + d_index R_idx(t) + eps(t),  eps = sigma z
///   ln sigma^2  = omega + alpha (|z(t-1)| - E|z|) + gamma z(t-1)
///                 + beta ln sigma^2(t-1) + d_var x(t)
///
/// x(t) is D(t) or, for the variance equation only, C(t).
struct ModelSpec {
  bool include_index = false;
  DummyLocation dummy_location = DummyLocation::none;
  RegressorKind regressor_kind = RegressorKind::dummy;
  double nu = 5.0;
  bool estimate_nu = false;

  /// Throws UsageError for count regressors outside the variance equation or nu <= 2.
  void validate() const;
  /// Stable file-name slug, e.g. `variance_dummy_index`.
  std::string slug() const;

  bool operator==(const ModelSpec&) const = default;
};

struct ParameterSet {
  double mu = 0.0;
  std::optional<double> delta_fork_mean;
  std::optional<double> delta_crix;
  double omega = 0.0;
  double alpha = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
  std::optional<double> delta_fork_variance;
  double nu = 5.0;

  /// All-zero parameters with presence flags matching `spec`; nu from the spec.
  static ParameterSet for_spec(const ModelSpec& spec);

  /// Throws UsageError unless |beta| < 1, nu > 2, all values finite and the
  /// optional coefficients are present exactly when `spec` uses them.
  void validate(const ModelSpec& spec) const;

  bool operator==(const ParameterSet&) const = default;
};

/// Mean of |z| for the unit-variance Student-t with `nu` degrees of freedom.
double expected_abs_z(double nu);

/// Log density of the unit-variance Student-t.
double std_t_log_density(double z, double nu);

/// Aligned model inputs on one date axis. `index_returns` is empty unless the
/// spec includes the index, `event_regressor` is empty when the spec has no
/// event term.
struct ModelData {
  std::vector<Date> dates;
  std::vector<double> returns;
  std::vector<double> index_returns;
  std::vector<double> event_regressor;

  std::size_t size() const { return returns.size(); }
};

/// Builds ModelData, checking that all series share the return dates.
ModelData make_model_data(const ReturnSeries& returns, const ReturnSeries* index_returns,
                          const EventRegressors& regressors, const ModelSpec& spec);

/// Pre-sample log variance used to start the recursion.
enum class VarianceSeed {
  sample,         // ln(mean of squared mean-equation residuals)
  unconditional,  // omega / (1 - beta)
};

struct VolatilityPath {
  std::vector<Date> dates;
  std::vector<double> sigma;
  std::vector<double> z;
};

struct FilterResult {
  VolatilityPath path;
  std::vector<double> log_lik_terms;
  double log_likelihood = 0.0;
  double initial_log_variance = 0.0;
};

/// Runs the variance recursion and evaluates the Student-t log-likelihood.
/// Deterministic; throws EstimationError naming the date of the first
/// non-finite variance or likelihood term.
FilterResult filter(const ModelData& data, const ParameterSet& params, const ModelSpec& spec,
                    VarianceSeed seed = VarianceSeed::sample);

/// Total log-likelihood only. Returns -inf instead of throwing when the
/// recursion diverges.
double log_likelihood(const ModelData& data, const ParameterSet& params, const ModelSpec& spec,
                      VarianceSeed seed = VarianceSeed::sample);

struct SimulationResult {
  ReturnSeries returns;
  VolatilityPath path;
  double initial_log_variance = 0.0;
  /// True when the pre-sample log variance is an exact fixed point of the
  /// sample seed rule, so `filter` on the returns reproduces `path` exactly.
  bool seed_consistent = false;
};

/// Simulates `horizon` days. `regressors` supplies dates and the event
/// regressor; if it is empty, consecutive dates from 2015-01-01 with no events
/// are used. `index_returns` is required when the spec includes the index.
SimulationResult simulate(const ParameterSet& params, const ModelSpec& spec,
                          const EventRegressors& regressors,
                          std::span<const double> index_returns, std::size_t horizon,
                          std::uint64_t seed);

/// Draws `n` i.i.d. unit-variance Student-t(nu) values.
std::vector<double> draw_standardized_t(std::size_t n, double nu, std::uint64_t seed);

}  // namespace forkvol

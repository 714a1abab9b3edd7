#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forkvol/egarch.hpp"
#include "forkvol/numdiff.hpp"

namespace forkvol {

/// Maps between a ParameterSet, the flat vector of free parameters in table
/// order (mu, delta_fork_mean, delta_crix, omega, alpha, beta, gamma,
/// delta_fork_variance, nu), and the unconstrained optimizer coordinates
/// (beta = tanh(b), nu = 2 + exp(c), everything else unchanged).
class ParameterLayout {
 public:
  explicit ParameterLayout(const ModelSpec& spec);

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;

  std::vector<double> pack(const ParameterSet& p) const;
  ParameterSet unpack(std::span<const double> natural) const;

  std::vector<double> to_unconstrained(std::span<const double> natural) const;
  std::vector<double> to_natural(std::span<const double> free) const;

 private:
  ModelSpec spec_;
  std::vector<std::string> names_;
};

struct InformationCriteria {
  double akaike = 0.0;
  double bayes = 0.0;
  double shibata = 0.0;
  double hannan_quinn = 0.0;

  bool operator==(const InformationCriteria&) const = default;
};

/// Per-observation criteria: (-2 LL + penalty) / n.
InformationCriteria information_criteria(double log_likelihood, std::size_t k, std::size_t n);

struct Convergence {
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  int best_start = 0;
  int successful_starts = 0;
  bool beta_at_boundary = false;  // |atanh(beta)| > 7

  bool operator==(const Convergence&) const = default;
};

struct FitResult {
  ModelSpec spec;
  ParameterSet params;
  std::vector<std::string> names;
  std::vector<double> estimates;
  std::vector<double> robust_se;
  std::vector<double> hessian_se;
  std::vector<double> t_values;
  std::vector<double> p_values;
  double log_likelihood = 0.0;
  std::size_t n_obs = 0;
  InformationCriteria ic;
  VolatilityPath sigma_path;
  Convergence convergence;

  std::size_t free_parameters() const { return estimates.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
};

struct FitOptions {
  int starts = 5;
  int max_iterations = 1000;
  double relative_tolerance = 1e-10;
  double gradient_tolerance = 1e-6;
  VarianceSeed seed = VarianceSeed::sample;
  bool parallel_starts = false;
  std::size_t min_observations = 300;
};

/// Deterministic start grid around moment-based initial values.
std::vector<ParameterSet> start_values(const ModelData& data, const ModelSpec& spec, int starts);

/// Quasi-maximum-likelihood fit. Throws EstimationError when every start
/// fails to converge or the sandwich covariance cannot be formed.
FitResult fit(const ModelData& data, const ModelSpec& spec, const FitOptions& options = {});

struct SandwichResult {
  Eigen::MatrixXd hessian;        // of the mean per-observation log-likelihood
  Eigen::MatrixXd outer_product;  // mean of score outer products
  Eigen::MatrixXd covariance;     // H^-1 S H^-1 / n
  std::vector<double> robust_se;
  std::vector<double> hessian_se;  // sqrt(diag(-H^-1 / n))
};

/// Sandwich covariance of a per-observation log-likelihood around `theta`,
/// with central differences at steps cbrt(eps) * max(1, |theta_k|).
SandwichResult sandwich_covariance(const VectorFunction& per_observation_log_lik,
                                   std::span<const double> theta);

/// Robust standard errors for a model at natural parameters `theta`.
SandwichResult robust_se(const ModelData& data, const ModelSpec& spec,
                         std::span<const double> theta, VarianceSeed seed = VarianceSeed::sample);

/// Two-sided p-value of `t` against Student-t(df).
double two_sided_p_value(double t, double df);

struct HypothesisOutcome {
  std::string name;  // H1_mean or H2_variance
  std::string coefficient_name;
  double coefficient = 0.0;
  double t_value = 0.0;
  double p_value = 1.0;
  std::vector<double> reject_at;  // subset of {0.10, 0.05, 0.01}
};

/// Tests H0: delta = 0 for the event coefficient the fit contains.
std::vector<HypothesisOutcome> test_hypotheses(const FitResult& fit);

std::vector<double> rejection_levels(double p_value);

}  // namespace forkvol

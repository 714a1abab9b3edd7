#pragma once

#include <string>
#include <vector>

#include "forkvol/numdiff.hpp"

namespace forkvol {

struct OptimizerOptions {
  int max_iterations = 1000;
  double relative_tolerance = 1e-10;  // on successive objective values
  double gradient_tolerance = 1e-6;   // Euclidean norm
};

struct OptimizerResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
  std::string message;
};

/// Quasi-Newton (BFGS) minimization with central-difference gradients and a
/// backtracking Armijo line search. The objective may return +inf to reject
/// a point. Converged means both the relative improvement and the gradient
/// norm fell below their tolerances.
OptimizerResult minimize_bfgs(const ScalarFunction& f, std::vector<double> x0,
                              const OptimizerOptions& options = {});

/// A few damped Newton steps with a numerical Hessian, starting from a
/// previous result. Only improving steps are taken.
OptimizerResult polish_newton(const ScalarFunction& f, const OptimizerResult& start,
                              const OptimizerOptions& options = {}, int max_steps = 8);

}  // namespace forkvol

#include "forkvol/optimizer.hpp"

#include <cmath>
#include <limits>

namespace forkvol {

namespace {

using Vec = Eigen::VectorXd;

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

Vec gradient_at(const ScalarFunction& f, const Vec& x) {
  const auto xs = to_std(x);
  return to_vec(central_gradient(f, xs, central_steps(xs)));
}

double relative_change(double before, double after) {
  return std::abs(before - after) / std::max(std::abs(after), 1e-300);
}

// Inverse of the numerical Hessian when it is positive definite; a scaled
// identity otherwise.
Eigen::MatrixXd initial_inverse_hessian(const ScalarFunction& f, const Vec& x, const Vec& g) {
  const auto xs = to_std(x);
  const Eigen::MatrixXd h = central_hessian(f, xs, central_steps(xs));
  if (h.allFinite()) {
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(x.size(), x.size()));
      if (inv.allFinite()) return inv;
    }
  }
  const double scale = 1.0 / std::max(1.0, g.norm());
  return scale * Eigen::MatrixXd::Identity(x.size(), x.size());
}

}  // namespace

OptimizerResult minimize_bfgs(const ScalarFunction& f, std::vector<double> x0,
                              const OptimizerOptions& options) {
  OptimizerResult result;
  Vec x = to_vec(x0);
  double fx = f(x0);
  result.x = x0;
  result.value = fx;
  if (!std::isfinite(fx)) {
    result.message = "objective is not finite at the starting point";
    return result;
  }

  const auto n = x.size();
  Vec g = gradient_at(f, x);
  if (!g.allFinite()) {
    result.message = "gradient is not finite at the starting point";
    return result;
  }
  Eigen::MatrixXd hinv = initial_inverse_hessian(f, x, g);
  bool reset_tried = false;
  // Consecutive accepted steps without a relative improvement above tolerance.
  int stalled = 0;
  bool stall_reset_done = false;

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    Vec d = -hinv * g;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      hinv = (1.0 / std::max(1.0, g.norm())) * Eigen::MatrixXd::Identity(n, n);
      d = -hinv * g;
      slope = g.dot(d);
    }

    double t = 1.0;
    bool accepted = false;
    Vec xn;
    double fn = fx;
    while (t > 1e-14) {
      xn = x + t * d;
      fn = f(to_std(xn));
      if (std::isfinite(fn) && fn <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (!reset_tried) {
        reset_tried = true;
        hinv = initial_inverse_hessian(f, x, g);
        continue;
      }
      result.message = "line search could not decrease the objective";
      break;
    }
    reset_tried = false;

    const Vec gn = gradient_at(f, xn);
    if (!gn.allFinite()) {
      result.message = "gradient became non-finite";
      break;
    }
    const Vec s = xn - x;
    const Vec y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
      hinv = left * hinv * left.transpose() + rho * s * s.transpose();
    }
    const double rel = relative_change(fx, fn);
    x = xn;
    fx = fn;
    g = gn;
    if (rel < options.relative_tolerance && g.norm() < options.gradient_tolerance) {
      result.converged = true;
      result.message = "converged";
      ++it;
      break;
    }
    if (rel >= options.relative_tolerance) {
      stalled = 0;
      stall_reset_done = false;
    } else if (++stalled == 5 && !stall_reset_done) {
      stall_reset_done = true;
      stalled = 0;
      hinv = initial_inverse_hessian(f, x, g);
    } else if (stalled >= 10) {
      result.message = "stalled: no relative improvement";
      ++it;
      break;
    }
  }

  result.x = to_std(x);
  result.value = fx;
  result.iterations = it;
  result.gradient_norm = g.norm();
  if (!result.converged && result.gradient_norm < options.gradient_tolerance &&
      result.message == "line search could not decrease the objective") {
    // No further decrease is representable: the relative improvement is zero.
    result.converged = true;
    result.message = "converged (no representable improvement)";
  }
  if (result.message.empty()) result.message = "iteration limit reached";
  return result;
}

OptimizerResult polish_newton(const ScalarFunction& f, const OptimizerResult& start,
                              const OptimizerOptions& options, int max_steps) {
  OptimizerResult result = start;
  Vec x = to_vec(start.x);
  double fx = start.value;
  if (!std::isfinite(fx)) return result;
  Vec g = gradient_at(f, x);

  for (int step = 0; step < max_steps; ++step) {
    const auto xs = to_std(x);
    const Eigen::MatrixXd h = central_hessian(f, xs, central_steps(xs));
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (!h.allFinite() || llt.info() != Eigen::Success) break;
    const Vec d = llt.solve(-g);

    double t = 1.0;
    bool improved = false;
    Vec xn;
    double fn = fx;
    for (int k = 0; k < 30; ++k, t *= 0.5) {
      xn = x + t * d;
      fn = f(to_std(xn));
      if (std::isfinite(fn) && fn < fx) {
        improved = true;
        break;
      }
    }
    if (!improved) break;
    const double rel = relative_change(fx, fn);
    x = xn;
    fx = fn;
    g = gradient_at(f, x);
    ++result.iterations;
    if (rel < options.relative_tolerance && g.norm() < options.gradient_tolerance) break;
  }

  result.x = to_std(x);
  result.value = fx;
  result.gradient_norm = g.norm();
  result.converged = result.gradient_norm < options.gradient_tolerance;
  result.message = result.converged ? "converged" : start.message;
  return result;
}

}  // namespace forkvol

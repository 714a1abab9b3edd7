#include "forkvol/numdiff.hpp"

#include <cmath>
#include <limits>

namespace forkvol {

std::vector<double> central_steps(std::span<const double> x) {
  const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  std::vector<double> h(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) h[k] = base * std::max(1.0, std::abs(x[k]));
  return h;
}

std::vector<double> central_gradient(const ScalarFunction& f, std::span<const double> x,
                                     std::span<const double> steps) {
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    point[k] = x[k] + steps[k];
    const double up = f(point);
    point[k] = x[k] - steps[k];
    const double down = f(point);
    point[k] = x[k];
    g[k] = (up - down) / (2.0 * steps[k]);
  }
  return g;
}

Eigen::MatrixXd central_hessian(const ScalarFunction& f, std::span<const double> x,
                                std::span<const double> steps) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd hess(n, n);
  std::vector<double> p(x.begin(), x.end());
  auto eval = [&](std::size_t i, double si, std::size_t j, double sj) {
    p[i] += si;
    p[j] += sj;
    const double v = f(p);
    p[i] = x[i];
    p[j] = x[j];
    return v;
  };
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double hi = steps[i];
    for (std::size_t j = i; j < x.size(); ++j) {
      const double hj = steps[j];
      const double pp = eval(i, hi, j, hj);
      const double pm = eval(i, hi, j, -hj);
      const double mp = eval(i, -hi, j, hj);
      const double mm = eval(i, -hi, j, -hj);
      const double v = (pp - pm - mp + mm) / (4.0 * hi * hj);
      hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      hess(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  return hess;
}

Eigen::MatrixXd central_jacobian(const VectorFunction& f, std::span<const double> x,
                                 std::span<const double> steps) {
  std::vector<double> point(x.begin(), x.end());
  Eigen::MatrixXd jac;
  for (std::size_t k = 0; k < x.size(); ++k) {
    point[k] = x[k] + steps[k];
    const auto up = f(point);
    point[k] = x[k] - steps[k];
    const auto down = f(point);
    point[k] = x[k];
    if (k == 0) jac.resize(static_cast<Eigen::Index>(up.size()), static_cast<Eigen::Index>(x.size()));
    for (std::size_t r = 0; r < up.size(); ++r) {
      jac(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = (up[r] - down[r]) / (2.0 * steps[k]);
    }
  }
  return jac;
}

}  // namespace forkvol

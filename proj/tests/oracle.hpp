// Independent reference computations used to check the library. Nothing here
// calls into forkvol's numerics.
#pragma once

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline double t_density(double z, double nu) {
  const double c = std::tgamma((nu + 1.0) / 2.0) /
                   (std::tgamma(nu / 2.0) * std::sqrt(std::numbers::pi * (nu - 2.0)));
  return c * std::pow(1.0 + z * z / (nu - 2.0), -(nu + 1.0) / 2.0);
}

// Integral of f over [0, inf).
inline double integrate_half_line(const std::function<double(double)>& f) {
  boost::math::quadrature::exp_sinh<double> q;
  return q.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
}

inline double abs_z_by_quadrature(double nu) {
  return 2.0 * integrate_half_line([nu](double z) { return z * t_density(z, nu); });
}

inline double density_mass(double nu) {
  return 2.0 * integrate_half_line([nu](double z) { return t_density(z, nu); });
}

struct Theta {
  double mu = 0, d_mean = 0, d_index = 0, omega = 0, alpha = 0, gamma = 0, beta = 0, d_var = 0, nu = 5;
};

struct Path {
  std::vector<double> sigma, z, ll;
  double total = 0.0;
};

// Direct transcription of the model, one day at a time. The pre-sample log
// variance is ln(mean squared residual) and the first shock is neutral.
inline Path recursion(const std::vector<double>& r, const std::vector<double>& index,
                      const std::vector<double>& event, const Theta& p) {
  const std::size_t n = r.size();
  auto x = [&](const std::vector<double>& v, std::size_t t) { return v.empty() ? 0.0 : v[t]; };
  std::vector<double> eps(n);
  double ss = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    eps[t] = r[t] - p.mu - p.d_mean * x(event, t) - p.d_index * x(index, t);
    ss += eps[t] * eps[t];
  }
  const double e_abs = 2.0 * std::sqrt(p.nu - 2.0) * std::tgamma((p.nu + 1.0) / 2.0) /
                       (std::sqrt(std::numbers::pi) * (p.nu - 1.0) * std::tgamma(p.nu / 2.0));
  Path out;
  double h = std::log(ss / static_cast<double>(n));
  double z_prev = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    double next = p.omega + p.beta * h + p.d_var * x(event, t);
    if (t > 0) next += p.alpha * (std::fabs(z_prev) - e_abs) + p.gamma * z_prev;
    h = next;
    const double s = std::sqrt(std::exp(h));
    const double z = eps[t] / s;
    const double ll = std::log(t_density(z, p.nu)) - std::log(s);
    out.sigma.push_back(s);
    out.z.push_back(z);
    out.ll.push_back(ll);
    out.total += ll;
    z_prev = z;
  }
  return out;
}

struct Sandwich {
  Eigen::MatrixXd cov;
  std::vector<double> se;
};

// H^-1 S H^-1 / n from plain central differences of the per-observation terms.
inline Sandwich sandwich(const std::function<std::vector<double>(const std::vector<double>&)>& terms,
                         const std::vector<double>& theta) {
  const std::size_t k = theta.size();
  const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
  std::vector<double> h(k);
  for (std::size_t i = 0; i < k; ++i) h[i] = h0 * std::max(1.0, std::fabs(theta[i]));
  const std::size_t n = terms(theta).size();
  auto mean_at = [&](std::vector<double> x) {
    double s = 0.0;
    for (double v : terms(x)) s += v;
    return s / static_cast<double>(n);
  };
  auto shifted = [&](int a, int sa, int b, int sb) {
    std::vector<double> x = theta;
    if (a >= 0) x[a] += sa * h[a];
    if (b >= 0) x[b] += sb * h[b];
    return x;
  };
  Eigen::MatrixXd H(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const int a = static_cast<int>(i), b = static_cast<int>(j);
      if (i == j) {
        H(i, i) = (mean_at(shifted(a, 2, -1, 0)) - 2.0 * mean_at(theta) + mean_at(shifted(a, -2, -1, 0))) /
                  (4.0 * h[i] * h[i]);
      } else {
        H(i, j) = (mean_at(shifted(a, 1, b, 1)) - mean_at(shifted(a, 1, b, -1)) -
                   mean_at(shifted(a, -1, b, 1)) + mean_at(shifted(a, -1, b, -1))) /
                  (4.0 * h[i] * h[j]);
      }
    }
  }
  Eigen::MatrixXd G(n, k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto up = terms(shifted(static_cast<int>(i), 1, -1, 0));
    const auto dn = terms(shifted(static_cast<int>(i), -1, -1, 0));
    for (std::size_t t = 0; t < n; ++t) G(t, i) = (up[t] - dn[t]) / (2.0 * h[i]);
  }
  const Eigen::MatrixXd S = G.transpose() * G / static_cast<double>(n);
  const Eigen::MatrixXd Hi = H.inverse();
  Sandwich out;
  out.cov = Hi * S * Hi / static_cast<double>(n);
  for (std::size_t i = 0; i < k; ++i) out.se.push_back(std::sqrt(out.cov(i, i)));
  return out;
}

struct Welch {
  double t, df;
};

inline Welch welch(const std::vector<double>& a, const std::vector<double>& b) {
  auto mv = [](const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= x.size();
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::pair{m, s / (x.size() - 1)};
  };
  const auto [m1, v1] = mv(a);
  const auto [m2, v2] = mv(b);
  const double q1 = v1 / a.size(), q2 = v2 / b.size();
  return {(m1 - m2) / std::sqrt(q1 + q2),
          (q1 + q2) * (q1 + q2) / (q1 * q1 / (a.size() - 1) + q2 * q2 / (b.size() - 1))};
}

}  // namespace oracle

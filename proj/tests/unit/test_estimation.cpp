#include <doctest.h>

#include <cmath>

#include "../oracle.hpp"
#include "forkvol/errors.hpp"
#include "forkvol/estimation.hpp"
#include "forkvol/optimizer.hpp"
#include "helpers.hpp"

using namespace forkvol;
using doctest::Approx;

namespace {

ModelSpec variance_spec(bool index = false) {
  ModelSpec s;
  s.dummy_location = DummyLocation::variance;
  s.include_index = index;
  return s;
}

struct Fixture {
  ModelSpec spec;
  ParameterSet truth;
  EventRegressors regs;
  ReturnSeries index;
  ModelData data;
};

Fixture simulated(std::size_t n, std::uint64_t seed, ModelSpec spec) {
  Fixture f;
  f.spec = spec;
  f.truth = testing::reference_params(spec);
  f.regs = testing::periodic_events(n, 20);
  if (spec.include_index) {
    f.index.dates = f.regs.dates;
    f.index.values = draw_standardized_t(n, 5.0, seed + 1000);
    for (double& v : f.index.values) v *= 0.03;
  }
  const auto sim = simulate(f.truth, spec, f.regs, f.index.values, n, seed);
  f.data = make_model_data(sim.returns, spec.include_index ? &f.index : nullptr, f.regs, spec);
  return f;
}

}  // namespace

TEST_SUITE("estimation") {
  TEST_CASE("information criteria arithmetic") {
    const auto ic = information_criteria(5825.0, 6, 2297);
    CHECK(std::abs(ic.akaike - (-5.06661)) < 1e-5);
    CHECK(ic.bayes == Approx((-11650.0 + 6.0 * std::log(2297.0)) / 2297.0));
    CHECK(ic.hannan_quinn == Approx((-11650.0 + 12.0 * std::log(std::log(2297.0))) / 2297.0));
    CHECK(ic.shibata == Approx((-11650.0 + 2297.0 * std::log(2309.0 / 2297.0)) / 2297.0));
    CHECK(information_criteria(0.0, 0, 100) == InformationCriteria{});
    CHECK_THROWS_AS(information_criteria(1.0, 5, 10), UsageError);
  }

  TEST_CASE("two-sided p-values") {
    CHECK(two_sided_p_value(0.0, 100) == 1.0);
    CHECK(two_sided_p_value(2.533, 2290) == Approx(0.0114).epsilon(0.02));
    CHECK(two_sided_p_value(-1.354, 2290) == Approx(0.176).epsilon(0.01));
    for (double t : {0.1, 1.5, 3.0, 8.0}) CHECK(two_sided_p_value(t, 50) == two_sided_p_value(-t, 50));
    CHECK(rejection_levels(0.0113) == std::vector<double>{0.10, 0.05});
    CHECK(rejection_levels(0.5).empty());
    CHECK(rejection_levels(0.001) == std::vector<double>{0.10, 0.05, 0.01});
  }

  TEST_CASE("hypotheses require an event coefficient") {
    FitResult r;
    r.names = {"mu", "delta_fork_variance"};
    r.estimates = {0.0, 0.0};
    r.t_values = {0.0, 0.0};
    r.p_values = {1.0, two_sided_p_value(0.0, 10)};
    const auto h = test_hypotheses(r);
    REQUIRE(h.size() == 1);
    CHECK(h[0].name == "H2_variance");
    CHECK(h[0].p_value == 1.0);
    CHECK(h[0].reject_at.empty());
    r.names = {"mu", "omega"};
    CHECK_THROWS_AS(test_hypotheses(r), UsageError);
  }

  TEST_CASE("layout round trips") {
    ModelSpec spec = variance_spec(true);
    spec.estimate_nu = true;
    const ParameterLayout layout(spec);
    CHECK(layout.names() ==
          std::vector<std::string>{"mu", "delta_crix", "omega", "alpha", "beta", "gamma", "delta_fork_variance", "nu"});
    auto p = testing::reference_params(spec);
    p.nu = 6.5;
    const auto packed = layout.pack(p);
    CHECK(layout.unpack(packed) == p);
    const auto back = layout.to_natural(layout.to_unconstrained(packed));
    for (std::size_t i = 0; i < packed.size(); ++i) CHECK(back[i] == Approx(packed[i]).epsilon(1e-14));
  }

  TEST_CASE("BFGS on the Rosenbrock function") {
    const ScalarFunction rosen = [](std::span<const double> x) {
      return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    const auto r = minimize_bfgs(rosen, {-1.2, 1.0});
    CHECK(r.converged);
    CHECK(r.x[0] == Approx(1.0).epsilon(1e-4));
    CHECK(r.x[1] == Approx(1.0).epsilon(1e-4));
  }

  TEST_CASE("sandwich of a quadratic is analytic") {
    // Per-observation terms -(theta - a_t)' A (theta - a_t) / 2: H = -A and the
    // sandwich collapses to the mean outer product of (theta - a_t), over n.
    Eigen::Matrix2d A;
    A << 2.0, 0.5, 0.5, 1.0;
    std::vector<Eigen::Vector2d> a;
    std::mt19937_64 gen(1);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 40; ++t) a.emplace_back(nd(gen), nd(gen));
    const VectorFunction terms = [&](std::span<const double> x) {
      std::vector<double> out;
      for (const auto& at : a) {
        const Eigen::Vector2d d = Eigen::Vector2d(x[0], x[1]) - at;
        out.push_back(-0.5 * d.dot(A * d));
      }
      return out;
    };
    const std::vector<double> theta{0.3, -0.2};
    const auto s = sandwich_covariance(terms, theta);
    Eigen::Matrix2d expected = Eigen::Matrix2d::Zero();
    for (const auto& at : a) {
      const Eigen::Vector2d d = Eigen::Vector2d(theta[0], theta[1]) - at;
      expected += d * d.transpose();
    }
    expected /= 40.0 * 40.0;
    CHECK((s.covariance - expected).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((s.hessian + A).cwiseAbs().maxCoeff() < 1e-4);  // difference quotient round-off
  }

  TEST_CASE("singular Hessian is reported") {
    const VectorFunction flat = [](std::span<const double> x) {
      return std::vector<double>{-x[0] * x[0], -x[0] * x[0] + 0.1};
    };
    CHECK_THROWS_AS(sandwich_covariance(flat, std::vector<double>{0.1, 0.2}), EstimationError);
  }

  TEST_CASE("robust_se matches an independent sandwich") {
    const auto f = simulated(500, 17, variance_spec());
    const ParameterLayout layout(f.spec);
    const auto theta = layout.pack(f.truth);
    const auto lib = robust_se(f.data, f.spec, theta);
    const auto ref = oracle::sandwich(
        [&](const std::vector<double>& x) {
          return oracle::recursion(f.data.returns, {}, f.data.event_regressor,
                                   {.mu = x[0], .omega = x[1], .alpha = x[2], .gamma = x[4], .beta = x[3], .d_var = x[5]})
              .ll;
        },
        theta);
    for (std::size_t i = 0; i < theta.size(); ++i) CHECK(lib.robust_se[i] == Approx(ref.se[i]).epsilon(1e-4));
  }

  TEST_CASE("fit rejects short samples") {
    const auto f = simulated(200, 1, variance_spec());
    CHECK_THROWS_AS(fit(f.data, f.spec), InputError);
  }

  TEST_CASE("fit on simulated data") {
    const auto f = simulated(3000, 5, variance_spec(true));
    const auto r = fit(f.data, f.spec);
    CHECK(r.convergence.converged);
    CHECK(r.free_parameters() == 7);
    CHECK(r.n_obs == 3000);
    const ParameterLayout layout(f.spec);
    const auto truth = layout.pack(f.truth);
    for (std::size_t i = 0; i < truth.size(); ++i) {
      CHECK(r.robust_se[i] > 0.0);
      CHECK(r.p_values[i] >= 0.0);
      CHECK(r.p_values[i] <= 1.0);
      CHECK(std::abs(r.estimates[i] - truth[i]) < 4.0 * r.robust_se[i]);
    }
    // Reported LL equals an independent evaluation at the estimates.
    const auto& e = r.estimates;
    const auto o = oracle::recursion(f.data.returns, f.data.index_returns, f.data.event_regressor,
                                     {.mu = e[0], .d_index = e[1], .omega = e[2], .alpha = e[3], .gamma = e[5],
                                      .beta = e[4], .d_var = e[6]});
    CHECK(std::abs(r.log_likelihood - o.total) < 1e-10 * std::abs(o.total) + 1e-10);
    CHECK(std::abs(r.log_likelihood - filter(f.data, r.params, f.spec).log_likelihood) < 1e-10);
    const auto ic = information_criteria(r.log_likelihood, 7, 3000);
    CHECK(r.ic == ic);
    CHECK(std::isfinite(ic.akaike));
    CHECK(r.sigma_path.sigma.size() == 3000);

    const auto h = test_hypotheses(r);
    REQUIRE(h.size() == 1);
    CHECK(h[0].coefficient == r.params.delta_fork_variance.value());

    // Deterministic across runs.
    const auto again = fit(f.data, f.spec);
    CHECK(again.estimates == r.estimates);
    CHECK(again.robust_se == r.robust_se);

    FitOptions parallel;
    parallel.parallel_starts = true;
    CHECK(fit(f.data, f.spec, parallel).estimates == r.estimates);
  }

  TEST_CASE("shifting returns moves only mu") {
    const auto f = simulated(2000, 8, variance_spec());
    const auto base = fit(f.data, f.spec);
    auto shifted = f.data;
    for (double& v : shifted.returns) v += 0.05;
    const auto moved = fit(shifted, f.spec);
    CHECK(moved.estimates[0] - base.estimates[0] == Approx(0.05).epsilon(1e-4));
    for (std::size_t i = 1; i < base.estimates.size(); ++i) {
      CHECK(std::abs(moved.estimates[i] - base.estimates[i]) < 1e-4);
    }
  }

  TEST_CASE("log-likelihood peaks near the truth") {
    int hits = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto f = simulated(5000, seed, variance_spec());
      const ParameterLayout layout(f.spec);
      const auto truth = layout.pack(f.truth);
      const double at_truth = log_likelihood(f.data, f.truth, f.spec);
      for (std::size_t k = 0; k < truth.size(); ++k) {
        auto bumped = truth;
        bumped[k] += 0.1;
        if (std::abs(bumped[k]) >= 1.0 && layout.names()[k] == "beta") bumped[k] = truth[k] - 0.1;
        ++total;
        if (at_truth > log_likelihood(f.data, layout.unpack(bumped), f.spec)) ++hits;
      }
    }
    CHECK(hits >= 0.95 * total);
  }

  TEST_CASE("hessian and robust SEs agree under correct specification") {
    const auto f = simulated(20000, 12, variance_spec());
    const ParameterLayout layout(f.spec);
    const auto s = robust_se(f.data, f.spec, layout.pack(f.truth));
    for (std::size_t i = 0; i < s.robust_se.size(); ++i) {
      const double ratio = s.robust_se[i] / s.hessian_se[i];
      CHECK(ratio > 0.8);
      CHECK(ratio < 1.25);
    }
  }

  TEST_CASE("seed sensitivity is below one robust SE") {
    const auto f = simulated(3000, 21, variance_spec());
    const auto sample = fit(f.data, f.spec);
    FitOptions alt;
    alt.seed = VarianceSeed::unconditional;
    const auto uncond = fit(f.data, f.spec, alt);
    for (std::size_t i = 0; i < sample.estimates.size(); ++i) {
      CHECK(std::abs(sample.estimates[i] - uncond.estimates[i]) < sample.robust_se[i]);
    }
  }
}

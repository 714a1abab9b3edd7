#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../oracle.hpp"
#include "forkvol/errors.hpp"
#include "forkvol/egarch.hpp"
#include "helpers.hpp"

using namespace forkvol;
using doctest::Approx;

namespace {

ModelData three_day_fixture() {
  ModelData d;
  d.dates = {testing::day("2017-01-01"), testing::day("2017-01-02"), testing::day("2017-01-03")};
  d.returns = {0.012, -0.031, 0.004};
  d.event_regressor = {0, 1, 0};
  return d;
}

ModelSpec variance_spec() {
  ModelSpec s;
  s.dummy_location = DummyLocation::variance;
  return s;
}

}  // namespace

TEST_SUITE("egarch") {
  TEST_CASE("E|z| against quadrature and limits") {
    CHECK(std::abs(expected_abs_z(3.0) - 2.0 / std::numbers::pi) < 1e-12);
    for (double nu : {3.0, 4.0, 5.0, 8.0, 20.0}) {
      CHECK(std::abs(expected_abs_z(nu) - oracle::abs_z_by_quadrature(nu)) < 1e-8);
    }
    CHECK(expected_abs_z(5.0) == Approx(0.735106).epsilon(1e-6));
    CHECK(std::abs(expected_abs_z(1e6) - std::sqrt(2.0 / std::numbers::pi)) < 1e-4);
    CHECK_THROWS_AS(expected_abs_z(2.0), UsageError);
  }

  TEST_CASE("standardized t density") {
    CHECK(std_t_log_density(0.0, 5.0) == Approx(std::log(0.490070)).epsilon(1e-6));
    CHECK(std_t_log_density(0.0, 5.0) == Approx(std::log(2.0 / (std::tgamma(2.5) * std::sqrt(3 * std::numbers::pi)))));
    for (double nu : {2.5, 5.0, 30.0}) {
      for (double z : {0.3, 1.7, 6.0}) CHECK(std_t_log_density(z, nu) == std_t_log_density(-z, nu));
    }
    for (double nu : {3.0, 5.0, 10.0}) {
      CHECK(std::abs(oracle::density_mass(nu) - 1.0) < 1e-8);
      for (double z : {-2.0, 0.0, 0.5, 4.0}) {
        CHECK(std_t_log_density(z, nu) == Approx(std::log(oracle::t_density(z, nu))).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("degenerate recursion is constant") {
    ModelSpec spec;
    auto p = ParameterSet::for_spec(spec);
    p.omega = -7.0;
    ModelData d;
    d.returns = {0.01, -0.02, 0.5, 0.0};
    const auto f = filter(d, p, spec);
    for (double s : f.path.sigma) CHECK(s == Approx(std::exp(-3.5)).epsilon(1e-15));
    CHECK(std::exp(-3.5) == Approx(0.030197).epsilon(1e-5));
  }

  TEST_CASE("three-observation fixture matches the step-by-step oracle") {
    const auto spec = variance_spec();
    auto p = ParameterSet::for_spec(spec);
    p.mu = 0.001;
    p.omega = -0.2;
    p.alpha = 0.1;
    p.gamma = 0.2;
    p.beta = 0.9;
    p.delta_fork_variance = 0.3;
    const auto d = three_day_fixture();
    const auto f = filter(d, p, spec);
    const auto o = oracle::recursion(d.returns, {}, d.event_regressor,
                                     {.mu = 0.001, .omega = -0.2, .alpha = 0.1, .gamma = 0.2, .beta = 0.9, .d_var = 0.3});
    for (std::size_t t = 0; t < 3; ++t) {
      CHECK(std::abs(f.path.sigma[t] - o.sigma[t]) < 1e-12);
      CHECK(std::abs(f.path.z[t] - o.z[t]) < 1e-12);
      CHECK(std::abs(f.log_lik_terms[t] - o.ll[t]) < 1e-12);
    }
    CHECK(std::abs(f.log_likelihood - o.total) < 1e-12);
  }

  TEST_CASE("index and mean dummy enter the residual") {
    ModelSpec spec;
    spec.include_index = true;
    spec.dummy_location = DummyLocation::mean;
    auto p = ParameterSet::for_spec(spec);
    p.mu = 0.002;
    p.delta_fork_mean = -0.01;
    p.delta_crix = 0.7;
    p.omega = -0.4;
    p.alpha = 0.08;
    p.gamma = -0.05;
    p.beta = 0.95;
    ModelData d;
    d.returns = {0.02, -0.01, 0.03, -0.04, 0.005};
    d.index_returns = {0.01, -0.02, 0.02, -0.03, 0.0};
    d.event_regressor = {0, 0, 1, 0, 1};
    const auto f = filter(d, p, spec);
    const auto o = oracle::recursion(d.returns, d.index_returns, d.event_regressor,
                                     {.mu = 0.002, .d_mean = -0.01, .d_index = 0.7, .omega = -0.4,
                                      .alpha = 0.08, .gamma = -0.05, .beta = 0.95});
    for (std::size_t t = 0; t < d.size(); ++t) CHECK(std::abs(f.path.sigma[t] - o.sigma[t]) < 1e-12);
  }

  TEST_CASE("unconditional seed") {
    ModelSpec spec;
    auto p = ParameterSet::for_spec(spec);
    p.omega = -0.1298;
    p.beta = 0.9826;
    ModelData d;
    d.returns = {0.01, 0.02};
    const auto f = filter(d, p, spec, VarianceSeed::unconditional);
    CHECK(f.initial_log_variance == Approx(-7.4598).epsilon(1e-4));
  }

  TEST_CASE("parameter validation") {
    const auto spec = variance_spec();
    auto p = ParameterSet::for_spec(spec);
    CHECK_NOTHROW(p.validate(spec));
    p.beta = 1.0;
    CHECK_THROWS_AS(p.validate(spec), UsageError);
    p.beta = 0.5;
    p.nu = 2.0;
    CHECK_THROWS_AS(p.validate(spec), UsageError);
    p.nu = 5.0;
    p.delta_fork_variance.reset();
    CHECK_THROWS_AS(p.validate(spec), UsageError);

    ModelSpec bad;
    bad.regressor_kind = RegressorKind::count;
    bad.dummy_location = DummyLocation::mean;
    CHECK_THROWS_AS(bad.validate(), UsageError);
    bad.dummy_location = DummyLocation::variance;
    CHECK_NOTHROW(bad.validate());
  }

  TEST_CASE("slugs name the four variants") {
    ModelSpec s;
    s.dummy_location = DummyLocation::mean;
    CHECK(s.slug() == "mean_dummy_noindex");
    s.include_index = true;
    s.dummy_location = DummyLocation::variance;
    CHECK(s.slug() == "variance_dummy_index");
    s.dummy_location = DummyLocation::none;
    s.estimate_nu = true;
    CHECK(s.slug() == "nodummy_index_nu");
  }

  TEST_CASE("divergent parameters name the date") {
    ModelSpec spec;
    auto p = ParameterSet::for_spec(spec);
    p.omega = 2000.0;
    ModelData d;
    d.dates = {testing::day("2017-03-04")};
    d.returns = {0.01};
    CHECK_THROWS_WITH_AS(filter(d, p, spec), doctest::Contains("2017-03-04"), EstimationError);
    CHECK(log_likelihood(d, p, spec) == -std::numeric_limits<double>::infinity());
  }

  TEST_CASE("filter is causal") {
    const auto spec = variance_spec();
    const auto p = testing::reference_params(spec);
    const auto regs = testing::periodic_events(200, 17);
    const auto sim = simulate(p, spec, regs, {}, 200, 5);
    auto data = make_model_data(sim.returns, nullptr, regs, spec);
    // Fix the seed so that only the recursion is compared.
    const auto base = filter(data, p, spec, VarianceSeed::unconditional);
    data.returns[120] += 0.3;
    const auto bumped = filter(data, p, spec, VarianceSeed::unconditional);
    for (std::size_t t = 0; t <= 120; ++t) CHECK(bumped.path.sigma[t] == base.path.sigma[t]);
    CHECK(bumped.path.sigma[121] != base.path.sigma[121]);
  }

  TEST_CASE("positive gamma gives the asymmetric response") {
    ModelSpec spec;
    auto p = ParameterSet::for_spec(spec);
    p.omega = -0.2;
    p.alpha = 0.1;
    p.gamma = 0.15;
    p.beta = 0.9;
    for (double c : {0.1, 1.0, 3.0}) {
      ModelData up, down;
      up.returns = {0.01, c};
      down.returns = {0.01, -c};
      // Same squared residuals, so the seed is shared; only z(1) differs in sign.
      const double s_up = filter(up, p, spec, VarianceSeed::unconditional).path.z[1];
      const double s_down = filter(down, p, spec, VarianceSeed::unconditional).path.z[1];
      CHECK(s_up == -s_down);
      up.returns.push_back(0.0);
      down.returns.push_back(0.0);
      CHECK(filter(up, p, spec, VarianceSeed::unconditional).path.sigma[2] >
            filter(down, p, spec, VarianceSeed::unconditional).path.sigma[2]);
    }
  }

  TEST_CASE("positive variance dummy raises event-day sigma") {
    const auto spec = variance_spec();
    auto p = testing::reference_params(spec);
    const auto regs = testing::periodic_events(300, 25);
    const auto sim = simulate(p, spec, regs, {}, 300, 9);
    auto data = make_model_data(sim.returns, nullptr, regs, spec);
    const auto with = filter(data, p, spec, VarianceSeed::unconditional);
    for (std::size_t t = 0; t < data.size(); ++t) {
      if (data.event_regressor[t] == 0.0) continue;
      auto flipped = data;
      flipped.event_regressor[t] = 0.0;
      CHECK(with.path.sigma[t] > filter(flipped, p, spec, VarianceSeed::unconditional).path.sigma[t]);
    }
  }

  TEST_CASE("simulate is seeded and reproducible") {
    const auto spec = variance_spec();
    const auto p = testing::reference_params(spec);
    const auto regs = testing::periodic_events(500, 40);
    const auto a = simulate(p, spec, regs, {}, 500, 42);
    const auto b = simulate(p, spec, regs, {}, 500, 42);
    const auto c = simulate(p, spec, regs, {}, 500, 43);
    CHECK(a.returns.values == b.returns.values);
    CHECK(a.path.sigma == b.path.sigma);
    CHECK(a.returns.values != c.returns.values);
    CHECK(a.returns.dates == regs.dates);
  }

  TEST_CASE("filter reproduces simulated sigma exactly") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto regs = testing::periodic_events(400, 30);
    for (int rep = 0; rep < 20; ++rep) {
      ModelSpec spec;
      spec.dummy_location = rep % 3 == 0 ? DummyLocation::mean : DummyLocation::variance;
      auto p = ParameterSet::for_spec(spec);
      p.mu = 0.004 * (u(gen) - 0.5);
      p.beta = 0.5 + 0.49 * u(gen);
      p.omega = (1.0 - p.beta) * (-8.0 + 4.0 * u(gen));
      p.alpha = 0.3 * u(gen);
      p.gamma = 0.4 * (u(gen) - 0.5);
      if (p.delta_fork_mean) p.delta_fork_mean = 0.02 * (u(gen) - 0.5);
      if (p.delta_fork_variance) p.delta_fork_variance = u(gen);
      const auto sim = simulate(p, spec, regs, {}, 400, 100 + rep);
      CHECK(sim.seed_consistent);
      const auto f = filter(make_model_data(sim.returns, nullptr, regs, spec), p, spec);
      CHECK(f.path.sigma == sim.path.sigma);
    }
  }

  TEST_CASE("i.i.d. special case matches the law of large numbers") {
    ModelSpec spec;
    auto p = ParameterSet::for_spec(spec);
    p.omega = std::log(0.0004);
    const auto sim = simulate(p, spec, {}, {}, 100000, 77);
    double ss = 0.0;
    for (double r : sim.returns.values) ss += r * r;
    CHECK(ss / 1e5 == Approx(0.0004).epsilon(0.02));
  }

  TEST_CASE("standardized draws have unit variance and t(5) kurtosis") {
    const auto z = draw_standardized_t(400000, 5.0, 3);
    double m2 = 0.0, m4 = 0.0;
    for (double v : z) {
      m2 += v * v;
      m4 += v * v * v * v;
    }
    m2 /= z.size();
    m4 /= z.size();
    CHECK(m2 == Approx(1.0).epsilon(0.02));
    // Excess kurtosis 6 converges slowly at nu = 5; a loose band is the honest check.
    CHECK(m4 / (m2 * m2) - 3.0 == Approx(6.0).epsilon(0.5));
  }

  TEST_CASE("make_model_data checks alignment") {
    ModelSpec spec;
    spec.include_index = true;
    const auto regs = testing::periodic_events(10, 0);
    ReturnSeries r{regs.dates, std::vector<double>(10, 0.0)};
    ReturnSeries idx{regs.dates, std::vector<double>(9, 0.0)};
    idx.dates.pop_back();
    CHECK_THROWS(make_model_data(r, &idx, regs, spec));
    CHECK_THROWS(make_model_data(r, nullptr, regs, spec));
  }
}

#include <doctest.h>

#include <random>

#include "../oracle.hpp"
#include "forkvol/errors.hpp"
#include "forkvol/grouptests.hpp"
#include "helpers.hpp"

using namespace forkvol;
using doctest::Approx;

namespace {

std::vector<double> normal_sample(std::size_t n, double mean, double sd, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(mean, sd);
  std::vector<double> x(n);
  for (double& v : x) v = nd(gen);
  return x;
}

struct Calendar {
  std::vector<Date> dates;
  std::vector<double> vol;
  std::vector<ClusterLabel> clusters;
};

// 600 days; events every 10 days with multiplicity cycling 1, 2, 3, 1, 1.
Calendar multiplicity_fixture(double multi_bump, std::uint64_t seed) {
  Calendar c;
  const auto start = Date::from_ymd(2017, 1, 1);
  c.vol = normal_sample(600, 0.04, 0.004, seed);
  for (int t = 0; t < 600; ++t) c.dates.push_back(start.plus_days(t));
  const int pattern[] = {1, 2, 3, 1, 1};
  for (int k = 0; k * 10 + 5 < 600; ++k) {
    const int count = pattern[k % 5];
    const auto t = static_cast<std::size_t>(k * 10 + 5);
    if (count >= 2) c.vol[t] += multi_bump;
    c.clusters.push_back({c.dates[t], false, count});
  }
  return c;
}

}  // namespace

TEST_SUITE("grouptests") {
  TEST_CASE("Welch on the textbook pair") {
    const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8};
    const auto r = welch_test(x, y);
    CHECK(r.t_value == Approx(-1.7321).epsilon(1e-4));
    CHECK(std::abs(r.df - 4.4118) < 1e-4);
    CHECK(r.p_value == Approx(0.157).epsilon(0.02));
    const auto o = oracle::welch(x, y);
    CHECK(r.t_value == Approx(o.t).epsilon(1e-14));
    CHECK(r.df == Approx(o.df).epsilon(1e-14));
    CHECK(r.difference == -2.5);
    CHECK(r.std_error_1 == Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  }

  TEST_CASE("identical samples and degenerate limits") {
    const std::vector<double> x{1, 5, 2, 8};
    const auto r = welch_test(x, x);
    CHECK(r.difference == 0.0);
    CHECK(r.p_value == 1.0);
    const std::vector<double> c{3, 3, 3};
    const auto flat = welch_test(c, c);
    CHECK(flat.t_value == 0.0);
    CHECK(flat.p_value == 1.0);
    CHECK(flat.df > 0.0);
    CHECK_THROWS_AS(welch_test(std::vector<double>{1}, x), InputError);
  }

  TEST_CASE("Welch properties on random samples") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      const auto a = normal_sample(3 + seed % 7, 0.0, 1.0 + seed % 3, seed);
      const auto b = normal_sample(4 + seed % 5, 0.5, 0.5, seed + 100);
      const auto ab = welch_test(a, b);
      const auto ba = welch_test(b, a);
      CHECK(ba.difference == -ab.difference);
      CHECK(ba.t_value == -ab.t_value);
      CHECK(ba.df == ab.df);
      CHECK(ba.p_value == ab.p_value);

      std::vector<double> a3 = a, b3 = b;
      for (double& v : a3) v *= 3.7;
      for (double& v : b3) v *= 3.7;
      const auto scaled = welch_test(a3, b3);
      CHECK(scaled.t_value == Approx(ab.t_value).epsilon(1e-12));
      CHECK(scaled.df == Approx(ab.df).epsilon(1e-12));
      CHECK(scaled.p_value == Approx(ab.p_value).epsilon(1e-10));

      const double lo = static_cast<double>(std::min(a.size(), b.size())) - 1.0;
      const double hi = static_cast<double>(a.size() + b.size()) - 2.0;
      CHECK(ab.df >= lo - 1e-12);
      CHECK(ab.df <= hi + 1e-12);
      CHECK(ab.p_value >= 0.0);
      CHECK(ab.p_value <= 1.0);
    }
  }

  TEST_CASE("multiplicity suite detects a constructed effect") {
    const auto c = multiplicity_fixture(0.05, 3);
    const DailyValues vol(c.dates, c.vol);
    const auto suite = multiplicity_suite(vol, c.clusters);
    REQUIRE(suite.size() == 4);
    CHECK(suite[0].label_2 == "Two forks");
    CHECK(suite[3].label_2 == "Multiple forks");
    // one vs two, one vs three and one vs multiple carry the bump; two vs three does not.
    for (std::size_t i : {0u, 1u, 3u}) {
      REQUIRE(suite[i].result);
      CHECK(suite[i].result->p_value < 0.01);
    }
    REQUIRE(suite[2].result);
  }

  TEST_CASE("multiplicity suite on constant volatility") {
    auto c = multiplicity_fixture(0.0, 4);
    std::fill(c.vol.begin(), c.vol.end(), 0.05);
    const DailyValues vol(c.dates, c.vol);
    for (const auto& row : multiplicity_suite(vol, c.clusters)) {
      REQUIRE(row.result);
      CHECK(std::abs(row.result->difference) < 1e-15);
    }
  }

  TEST_CASE("empty groups are reported, others still run") {
    auto c = multiplicity_fixture(0.0, 5);
    for (auto& l : c.clusters) l.same_day_count = std::min(l.same_day_count, 2);
    const DailyValues vol(c.dates, c.vol);
    const auto suite = multiplicity_suite(vol, c.clusters);
    CHECK(suite[0].result.has_value());
    CHECK_FALSE(suite[1].result.has_value());
    CHECK(suite[1].note.find("unavailable") != std::string::npos);
    CHECK(suite[3].result.has_value());
  }

  TEST_CASE("delayed effects: decay is detected, noise is not") {
    const auto start = Date::from_ymd(2017, 1, 1);
    std::vector<Date> dates;
    for (int t = 0; t < 800; ++t) dates.push_back(start.plus_days(t));
    std::vector<ClusterLabel> clusters;
    for (int t = 10; t + 5 < 800; t += 15) clusters.push_back({dates[static_cast<std::size_t>(t)], false, 1});

    auto noise = normal_sample(800, 0.04, 0.004, 8);
    const DailyValues flat(dates, noise);
    const auto null_table = delayed_effect_suite(flat, clusters, 3);
    CHECK(null_table.no_subsequent.available);
    CHECK_FALSE(null_table.subsequent.available);
    REQUIRE(null_table.no_subsequent.lags.size() == 3);
    for (const auto& row : null_table.no_subsequent.lags) {
      REQUIRE(row.test);
      CHECK(row.test->p_value > 0.01);
    }

    auto spiky = noise;
    for (const auto& c : clusters) {
      const auto t = static_cast<std::size_t>(start.days_until(c.event_date));
      for (int k = 0; k <= 3; ++k) spiky[t + k] += 0.08 * std::pow(0.5, k);
    }
    const DailyValues decaying(dates, spiky);
    const auto table = delayed_effect_suite(decaying, clusters, 3);
    REQUIRE(table.no_subsequent.lags[2].test);
    CHECK(table.no_subsequent.lags[2].test->p_value < 0.01);
    CHECK(table.no_subsequent.event_day_mean > table.no_subsequent.lags[2].mean);

    CHECK_THROWS_AS(delayed_effect_suite(flat, clusters, 0), UsageError);
  }
}

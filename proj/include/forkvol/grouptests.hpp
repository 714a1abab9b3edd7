#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forkvol/date.hpp"
#include "forkvol/events.hpp"

namespace forkvol {

struct WelchResult {
  double mean_1 = 0.0;
  double mean_2 = 0.0;
  double difference = 0.0;  // mean_1 - mean_2
  double std_error_1 = 0.0;  // s_1 / sqrt(n_1)
  double std_error_2 = 0.0;
  double t_value = 0.0;
  double df = 0.0;  // Welch-Satterthwaite
  double p_value = 1.0;
  std::size_t n_1 = 0;
  std::size_t n_2 = 0;

  bool operator==(const WelchResult&) const = default;
};

/// Two-sample Welch t-test, two-sided. Both samples need >= 2 values. When
/// both variances are zero and the means agree, t = 0 and p = 1.
WelchResult welch_test(std::span<const double> sample_1, std::span<const double> sample_2);

/// Date-indexed view of a daily series (e.g. fitted sigma).
class DailyValues {
 public:
  DailyValues(std::span<const Date> dates, std::span<const double> values);
  std::optional<double> at(Date d) const;

 private:
  std::span<const Date> dates_;
  std::span<const double> values_;
};

struct GroupComparison {
  std::string label_1;
  std::string label_2;
  std::optional<WelchResult> result;  // empty when a group is too small
  std::string note;
};

/// One vs two, one vs three, two vs three, one vs multiple (>= 2) same-day events.
std::vector<GroupComparison> multiplicity_suite(const DailyValues& vol,
                                                std::span<const ClusterLabel> clusters);

struct LagRow {
  int lag = 0;
  std::size_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::optional<WelchResult> test;  // day t vs day t + lag
};

struct DelayedBranch {
  std::string name;
  bool available = false;
  std::size_t events = 0;
  double event_day_mean = 0.0;
  double event_day_std_error = 0.0;
  std::vector<LagRow> lags;
  std::string note;
};

struct DelayedEffectTable {
  int horizon = 3;
  DelayedBranch no_subsequent;
  DelayedBranch subsequent;
};

/// Pooled Welch tests of event-day volatility against volatility `lag`
/// calendar days later, separately for events with and without a follow-up
/// event inside the cluster window.
DelayedEffectTable delayed_effect_suite(const DailyValues& vol,
                                        std::span<const ClusterLabel> clusters, int horizon = 3);

}  // namespace forkvol

#include "forkvol/grouptests.hpp"

#include <algorithm>
#include <cmath>

#include "forkvol/errors.hpp"
#include "forkvol/estimation.hpp"

namespace forkvol {

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // n - 1 denominator
};

Moments moments(std::span<const double> x) {
  Moments m;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  for (double v : x) m.var += (v - m.mean) * (v - m.mean);
  m.var /= static_cast<double>(x.size() - 1);
  return m;
}

}  // namespace

WelchResult welch_test(std::span<const double> sample_1, std::span<const double> sample_2) {
  if (sample_1.size() < 2 || sample_2.size() < 2) {
    throw InputError("welch_test: each sample needs at least 2 observations");
  }
  const auto a = moments(sample_1);
  const auto b = moments(sample_2);
  const double n1 = static_cast<double>(sample_1.size());
  const double n2 = static_cast<double>(sample_2.size());

  WelchResult r;
  r.n_1 = sample_1.size();
  r.n_2 = sample_2.size();
  r.mean_1 = a.mean;
  r.mean_2 = b.mean;
  r.difference = a.mean - b.mean;
  r.std_error_1 = std::sqrt(a.var / n1);
  r.std_error_2 = std::sqrt(b.var / n2);

  const double v1 = a.var / n1;
  const double v2 = b.var / n2;
  if (v1 + v2 == 0.0) {
    if (r.difference != 0.0) {
      throw InputError("welch_test: both samples are constant with different means");
    }
    r.t_value = 0.0;
    r.df = n1 + n2 - 2.0;
    r.p_value = 1.0;
    return r;
  }
  r.t_value = r.difference / std::sqrt(v1 + v2);
  r.df = (v1 + v2) * (v1 + v2) / (v1 * v1 / (n1 - 1.0) + v2 * v2 / (n2 - 1.0));
  r.p_value = two_sided_p_value(r.t_value, r.df);
  return r;
}

DailyValues::DailyValues(std::span<const Date> dates, std::span<const double> values)
    : dates_(dates), values_(values) {
  if (dates.size() != values.size()) throw InputError("DailyValues: dates and values differ in length");
}

std::optional<double> DailyValues::at(Date d) const {
  const auto it = std::lower_bound(dates_.begin(), dates_.end(), d);
  if (it == dates_.end() || *it != d) return std::nullopt;
  return values_[static_cast<std::size_t>(it - dates_.begin())];
}

namespace {

GroupComparison compare(std::string l1, std::span<const double> s1, std::string l2,
                        std::span<const double> s2) {
  GroupComparison c{std::move(l1), std::move(l2), std::nullopt, {}};
  if (s1.size() < 2 || s2.size() < 2) {
    c.note = "unavailable: groups have " + std::to_string(s1.size()) + " and " +
             std::to_string(s2.size()) + " observations";
    return c;
  }
  try {
    c.result = welch_test(s1, s2);
  } catch (const InputError& e) {
    c.note = std::string("unavailable: ") + e.what();
  }
  return c;
}

}  // namespace

std::vector<GroupComparison> multiplicity_suite(const DailyValues& vol,
                                                std::span<const ClusterLabel> clusters) {
  std::vector<double> one, two, three, multiple;
  for (const auto& c : clusters) {
    const auto v = vol.at(c.event_date);
    if (!v) continue;
    if (c.same_day_count == 1) one.push_back(*v);
    if (c.same_day_count == 2) two.push_back(*v);
    if (c.same_day_count == 3) three.push_back(*v);
    if (c.same_day_count >= 2) multiple.push_back(*v);
  }
  return {compare("One fork", one, "Two forks", two),
          compare("One fork", one, "Three forks", three),
          compare("Two forks", two, "Three forks", three),
          compare("One fork", one, "Multiple forks", multiple)};
}

namespace {

DelayedBranch run_branch(std::string name, const DailyValues& vol,
                         const std::vector<Date>& event_dates, int horizon) {
  DelayedBranch b;
  b.name = std::move(name);
  b.events = event_dates.size();
  std::vector<double> day0;
  for (Date d : event_dates) {
    if (auto v = vol.at(d)) day0.push_back(*v);
  }
  if (day0.size() < 2) {
    b.note = "unavailable: " + std::to_string(day0.size()) + " events with a volatility value";
    return b;
  }
  const auto m0 = moments(day0);
  b.available = true;
  b.event_day_mean = m0.mean;
  b.event_day_std_error = std::sqrt(m0.var / static_cast<double>(day0.size()));

  for (int lag = 1; lag <= horizon; ++lag) {
    LagRow row;
    row.lag = lag;
    std::vector<double> later;
    for (Date d : event_dates) {
      if (auto v = vol.at(d.plus_days(lag))) later.push_back(*v);
    }
    row.n = later.size();
    if (!later.empty()) {
      double sum = 0.0;
      for (double v : later) sum += v;
      row.mean = sum / static_cast<double>(later.size());
    }
    if (later.size() >= 2) {
      const auto m = moments(later);
      row.std_error = std::sqrt(m.var / static_cast<double>(later.size()));
      try {
        row.test = welch_test(day0, later);
      } catch (const InputError&) {
      }
    }
    b.lags.push_back(row);
  }
  return b;
}

}  // namespace

DelayedEffectTable delayed_effect_suite(const DailyValues& vol,
                                        std::span<const ClusterLabel> clusters, int horizon) {
  if (horizon < 1) throw UsageError("delayed_effect_suite: horizon must be >= 1");
  std::vector<Date> alone, followed;
  for (const auto& c : clusters) (c.is_followed ? followed : alone).push_back(c.event_date);
  DelayedEffectTable table;
  table.horizon = horizon;
  table.no_subsequent = run_branch("No subsequent forks", vol, alone, horizon);
  table.subsequent = run_branch("Subsequent forks", vol, followed, horizon);
  return table;
}

}  // namespace forkvol

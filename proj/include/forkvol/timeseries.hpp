#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "forkvol/date.hpp"

namespace forkvol {

enum class ReturnMethod { log, simple };

std::string_view to_string(ReturnMethod m);
ReturnMethod parse_return_method(std::string_view text);

/// Day-indexed real values. Used for returns and for any other daily series
/// (fitted volatility, proxies) that must be looked up by date.
struct ReturnSeries {
  std::vector<Date> dates;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
};

/// `date,return` CSV; values may be any finite real.
ReturnSeries read_returns(const std::filesystem::path& path);
ReturnSeries parse_returns(std::istream& in, std::string_view source_label);
void write_returns(std::ostream& out, const ReturnSeries& series);

/// r(t) from consecutive prices; the first date is dropped.
ReturnSeries to_returns(std::span<const Date> dates, std::span<const double> prices,
                        ReturnMethod method = ReturnMethod::log);

struct DescriptiveStats {
  std::size_t n = 0;
  double mean = 0.0;
  double std_dev = 0.0;  // n - 1 denominator
  double min = 0.0;
  double max = 0.0;
  double skewness = 0.0;         // m3 / m2^1.5, population moments
  double excess_kurtosis = 0.0;  // m4 / m2^2 - 3
  double jarque_bera = 0.0;
  double jb_p_value = 1.0;

  bool operator==(const DescriptiveStats&) const = default;
};

DescriptiveStats describe(std::span<const double> values);

struct JarqueBera {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// JB = n/6 (S^2 + K^2/4) with K the excess kurtosis; p from chi-square(2).
JarqueBera jarque_bera(double skewness, double excess_kurtosis, std::size_t n);

double chi_square_survival(double x, double df);

}  // namespace forkvol

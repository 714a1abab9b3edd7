#include "forkvol/timeseries.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "forkvol/errors.hpp"
#include "forkvol/numtext.hpp"

namespace forkvol {

std::string_view to_string(ReturnMethod m) { return m == ReturnMethod::log ? "log" : "simple"; }

ReturnMethod parse_return_method(std::string_view text) {
  if (text == "log") return ReturnMethod::log;
  if (text == "simple") return ReturnMethod::simple;
  throw UsageError("unknown return method '" + std::string(text) + "' (expected log|simple)");
}

ReturnSeries parse_returns(std::istream& in, std::string_view source_label) {
  const std::string where = source_label.empty() ? "" : std::string(source_label) + ": ";
  std::string line;
  if (!std::getline(in, line)) throw InputError(where + "empty returns file (missing header)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "date,return") throw InputError(where + "expected header 'date,return' at line 1");
  ReturnSeries out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const auto date = comma == std::string::npos ? std::nullopt : Date::try_parse(line.substr(0, comma));
    const auto value = comma == std::string::npos ? std::nullopt : parse_decimal(std::string_view(line).substr(comma + 1));
    if (!date || !value || !std::isfinite(*value)) {
      throw InputError(where + "malformed row at line " + std::to_string(line_no));
    }
    if (!out.dates.empty() && !(out.dates.back() < *date)) {
      throw InputError(where + "dates not strictly increasing at line " + std::to_string(line_no));
    }
    out.dates.push_back(*date);
    out.values.push_back(*value);
  }
  return out;
}

ReturnSeries read_returns(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open returns file " + path.string());
  return parse_returns(in, path.string());
}

void write_returns(std::ostream& out, const ReturnSeries& series) {
  out << "date,return\n";
  for (std::size_t t = 0; t < series.size(); ++t) {
    out << series.dates[t].iso() << ',' << to_decimal(series.values[t]) << '\n';
  }
}

ReturnSeries to_returns(std::span<const Date> dates, std::span<const double> prices,
                        ReturnMethod method) {
  if (dates.size() != prices.size()) throw InputError("to_returns: dates and prices differ in length");
  if (prices.size() < 2) throw InputError("to_returns: need at least 2 prices");
  ReturnSeries out;
  out.dates.assign(dates.begin() + 1, dates.end());
  out.values.resize(prices.size() - 1);
  for (std::size_t t = 1; t < prices.size(); ++t) {
    if (!(prices[t] > 0.0) || !(prices[t - 1] > 0.0)) {
      throw InputError("to_returns: non-positive price on " + dates[t].iso());
    }
    const double ratio = prices[t] / prices[t - 1];
    out.values[t - 1] = method == ReturnMethod::log ? std::log(ratio) : ratio - 1.0;
  }
  return out;
}

DescriptiveStats describe(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 4) throw InputError("describe: need at least 4 observations, got " + std::to_string(n));

  DescriptiveStats s;
  s.n = n;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;

  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(n);

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - s.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const double nn = static_cast<double>(n);
  s.std_dev = std::sqrt(m2 / (nn - 1.0));
  m2 /= nn;
  m3 /= nn;
  m4 /= nn;
  if (m2 > 0.0) {
    s.skewness = m3 / std::pow(m2, 1.5);
    s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  const auto jb = jarque_bera(s.skewness, s.excess_kurtosis, n);
  s.jarque_bera = jb.statistic;
  s.jb_p_value = jb.p_value;
  return s;
}

double chi_square_survival(double x, double df) {
  if (x <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), x));
}

JarqueBera jarque_bera(double skewness, double excess_kurtosis, std::size_t n) {
  if (n < 4) throw InputError("jarque_bera: need n >= 4");
  JarqueBera out;
  out.statistic = static_cast<double>(n) / 6.0 *
                  (skewness * skewness + excess_kurtosis * excess_kurtosis / 4.0);
  out.p_value = chi_square_survival(out.statistic, 2.0);
  return out;
}

}  // namespace forkvol

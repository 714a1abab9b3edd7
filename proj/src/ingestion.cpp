#include "forkvol/ingestion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "forkvol/errors.hpp"
#include "forkvol/numtext.hpp"

namespace forkvol {

namespace {

std::string prefix(std::string_view label) {
  return label.empty() ? std::string{} : std::string(label) + ": ";
}

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

struct NumberedPoint {
  PricePoint point;
  std::size_t line = 0;
};

}  // namespace

PriceSeries parse_prices(std::istream& in, std::string_view source_label) {
  const std::string where = prefix(source_label);
  std::string raw;
  std::size_t line_no = 0;
  if (!std::getline(in, raw)) throw InputError(where + "empty price file (missing header)");
  ++line_no;
  std::string_view header = trim_cr(raw);
  if (header.size() >= 3 && header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
  if (header != "date,close") {
    throw InputError(where + "expected header 'date,close' at line 1, got '" + std::string(header) +
                     "'");
  }

  std::vector<NumberedPoint> rows;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim_cr(raw);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw InputError(where + "malformed row at line " + std::to_string(line_no));
    }
    const auto date = Date::try_parse(line.substr(0, comma));
    const auto close = parse_decimal(line.substr(comma + 1));
    if (!date || !close) {
      throw InputError(where + "malformed row at line " + std::to_string(line_no));
    }
    if (!(*close > 0.0) || !std::isfinite(*close)) {
      throw InputError(where + "non-positive price at line " + std::to_string(line_no));
    }
    rows.push_back({{*date, *close}, line_no});
  }

  std::stable_sort(rows.begin(), rows.end(), [](const NumberedPoint& a, const NumberedPoint& b) {
    return a.point.date < b.point.date;
  });
  PriceSeries out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].point.date == rows[i - 1].point.date) {
      const auto later = std::max(rows[i].line, rows[i - 1].line);
      throw InputError(where + "duplicate date " + rows[i].point.date.iso() + " at line " +
                       std::to_string(later));
    }
    out.push_back(rows[i].point);
  }
  return out;
}

PriceSeries read_prices(const std::filesystem::path& path, std::string_view source_label) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open price file " + path.string());
  const std::string label = source_label.empty() ? path.string() : std::string(source_label);
  return parse_prices(in, label);
}

void validate_prices(std::span<const PricePoint> series, std::string_view source_label) {
  const std::string where = prefix(source_label);
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!(series[i].close > 0.0) || !std::isfinite(series[i].close)) {
      throw InputError(where + "non-positive price on " + series[i].date.iso());
    }
    if (i > 0 && !(series[i - 1].date < series[i].date)) {
      throw InputError(where + "dates not strictly increasing at " + series[i].date.iso());
    }
  }
}

void write_prices(std::ostream& out, std::span<const PricePoint> series) {
  out << "date,close\n";
  for (const auto& p : series) out << p.date.iso() << ',' << to_decimal(p.close) << '\n';
}

void write_prices(const std::filesystem::path& path, std::span<const PricePoint> series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  write_prices(out, series);
}

PriceSeries Panel::asset_points() const {
  PriceSeries out(dates.size());
  for (std::size_t i = 0; i < dates.size(); ++i) out[i] = {dates[i], asset_close[i]};
  return out;
}

PriceSeries Panel::index_points() const {
  if (!index_close) return {};
  PriceSeries out(dates.size());
  for (std::size_t i = 0; i < dates.size(); ++i) out[i] = {dates[i], (*index_close)[i]};
  return out;
}

Panel align(std::span<const PricePoint> asset, std::optional<std::span<const PricePoint>> index) {
  Panel panel;
  if (asset.empty()) throw InputError("align: asset series is empty");
  if (!index) {
    panel.dates.reserve(asset.size());
    panel.asset_close.reserve(asset.size());
    for (const auto& p : asset) {
      panel.dates.push_back(p.date);
      panel.asset_close.push_back(p.close);
    }
    return panel;
  }
  if (index->empty()) throw InputError("align: index series is empty");

  std::vector<double> index_close;
  std::size_t i = 0, j = 0;
  while (i < asset.size() && j < index->size()) {
    const Date a = asset[i].date;
    const Date b = (*index)[j].date;
    if (a < b) {
      ++panel.dropped_asset_dates;
      ++i;
    } else if (b < a) {
      ++panel.dropped_index_dates;
      ++j;
    } else {
      panel.dates.push_back(a);
      panel.asset_close.push_back(asset[i].close);
      index_close.push_back((*index)[j].close);
      ++i;
      ++j;
    }
  }
  panel.dropped_asset_dates += asset.size() - i;
  panel.dropped_index_dates += index->size() - j;
  if (panel.dates.empty()) throw InputError("align: empty intersection of asset and index dates");
  panel.index_close = std::move(index_close);
  return panel;
}

PriceSeries clip(std::span<const PricePoint> series, std::optional<Date> first,
                 std::optional<Date> last) {
  PriceSeries out;
  for (const auto& p : series) {
    if (first && p.date < *first) continue;
    if (last && *last < p.date) continue;
    out.push_back(p);
  }
  return out;
}

}  // namespace forkvol

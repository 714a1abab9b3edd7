#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "forkvol/date.hpp"

namespace forkvol {

struct PricePoint {
  Date date;
  double close = 0.0;

  bool operator==(const PricePoint&) const = default;
};

using PriceSeries = std::vector<PricePoint>;

/// Reads a `date,close` CSV. The result is sorted by date; rows may appear in
/// any order in the file. Errors name `source_label` and the 1-based line.
PriceSeries read_prices(const std::filesystem::path& path, std::string_view source_label = {});
PriceSeries parse_prices(std::istream& in, std::string_view source_label);

void write_prices(std::ostream& out, std::span<const PricePoint> series);
void write_prices(const std::filesystem::path& path, std::span<const PricePoint> series);

/// Checks close > 0 and strictly increasing dates.
void validate_prices(std::span<const PricePoint> series, std::string_view source_label);

/// Asset and optional index closes on a shared date axis (inner join).
struct Panel {
  std::vector<Date> dates;
  std::vector<double> asset_close;
  std::optional<std::vector<double>> index_close;
  std::size_t dropped_asset_dates = 0;  // asset dates with no index quote
  std::size_t dropped_index_dates = 0;  // index dates with no asset quote

  std::size_t size() const { return dates.size(); }
  bool has_index() const { return index_close.has_value(); }
  PriceSeries asset_points() const;
  PriceSeries index_points() const;
};

Panel align(std::span<const PricePoint> asset,
            std::optional<std::span<const PricePoint>> index = std::nullopt);

/// Restricts a series to [first, last] inclusive.
PriceSeries clip(std::span<const PricePoint> series, std::optional<Date> first,
                 std::optional<Date> last);

}  // namespace forkvol

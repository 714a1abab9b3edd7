#include "forkvol/date.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "forkvol/errors.hpp"

namespace forkvol {

namespace {

bool parse_field(std::string_view text, int& out) {
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                        std::chrono::day{day}};
  if (!ymd.ok()) {
    throw InputError("invalid calendar date " + std::to_string(year) + "-" + std::to_string(month) +
                     "-" + std::to_string(day));
  }
  const std::chrono::sys_days days{ymd};
  return Date(static_cast<std::int32_t>(days.time_since_epoch().count()));
}

std::optional<Date> Date::try_parse(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_field(iso.substr(0, 4), y) || !parse_field(iso.substr(5, 2), m) ||
      !parse_field(iso.substr(8, 2), d)) {
    return std::nullopt;
  }
  if (m < 1 || d < 1) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date(static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count()));
}

Date Date::parse(std::string_view iso) {
  if (auto d = try_parse(iso)) return *d;
  throw InputError("invalid date '" + std::string(iso) + "' (expected YYYY-MM-DD)");
}

std::string Date::iso() const {
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{serial_}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace forkvol

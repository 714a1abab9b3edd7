#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace forkvol {

/// Calendar day, stored as a day count since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  static constexpr Date from_serial(std::int32_t days) { return Date(days); }
  static Date from_ymd(int year, unsigned month, unsigned day);

  /// Strict `YYYY-MM-DD`; throws InputError on anything else.
  static Date parse(std::string_view iso);
  static std::optional<Date> try_parse(std::string_view iso);

  std::string iso() const;
  constexpr std::int32_t serial() const { return serial_; }

  constexpr Date plus_days(std::int32_t n) const { return Date(serial_ + n); }
  /// Signed number of days from this date to `other`.
  constexpr std::int32_t days_until(Date other) const { return other.serial_ - serial_; }

  constexpr auto operator<=>(const Date&) const = default;

 private:
  constexpr explicit Date(std::int32_t serial) : serial_(serial) {}
  std::int32_t serial_ = 0;
};

}  // namespace forkvol

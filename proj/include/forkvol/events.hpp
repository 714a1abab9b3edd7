#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forkvol/date.hpp"

namespace forkvol {

enum class ForkKind { hard, soft, unknown };

std::string_view to_string(ForkKind kind);
ForkKind parse_fork_kind(std::string_view text);

struct EventRecord {
  Date date;
  std::string name;
  std::string ticker;
  ForkKind kind = ForkKind::unknown;

  bool operator==(const EventRecord&) const = default;
};

using EventCalendar = std::vector<EventRecord>;

/// Reads a `date,name,ticker,kind` CSV. Fields may be double-quoted.
EventCalendar read_events(const std::filesystem::path& path);
EventCalendar parse_events(std::istream& in, std::string_view source_label);
void write_events(std::ostream& out, std::span<const EventRecord> calendar);

/// How to treat an event dated on a day that is absent from the return axis.
enum class DatePolicy { drop, next_day };

std::string_view to_string(DatePolicy p);
DatePolicy parse_date_policy(std::string_view text);

/// Which event regressor enters the model: D(t) indicator or C(t) count.
enum class RegressorKind { dummy, count };

std::string_view to_string(RegressorKind k);
RegressorKind parse_regressor_kind(std::string_view text);

struct EventRegressors {
  std::vector<Date> dates;
  std::vector<int> dummy;  // D(t), 1 iff count(t) >= 1
  std::vector<int> count;  // C(t)
  std::size_t dropped = 0;    // inside the range but no usable date under the policy
  std::size_t off_range = 0;  // before the first or after the last date

  std::size_t size() const { return dates.size(); }
  std::size_t event_days() const;
  std::vector<double> as_real(RegressorKind kind) const;
};

/// Zero regressors on `dates`.
EventRegressors no_events(std::span<const Date> dates);

/// Resolves each event onto `dates` under `policy`. Returned events carry
/// their effective date; events that cannot be placed are omitted and
/// counted in `dropped` / `off_range`.
struct PlacedEvents {
  EventCalendar events;
  std::size_t dropped = 0;
  std::size_t off_range = 0;
};
PlacedEvents place_events(std::span<const EventRecord> calendar, std::span<const Date> dates,
                          DatePolicy policy);

EventRegressors build_regressors(std::span<const EventRecord> calendar,
                                 std::span<const Date> dates,
                                 DatePolicy policy = DatePolicy::next_day);

EventCalendar filter_hard(std::span<const EventRecord> calendar);

struct ClusterLabel {
  Date event_date;
  bool is_followed = false;  // another event within (0, window] days
  int same_day_count = 1;

  bool operator==(const ClusterLabel&) const = default;
};

/// One label per distinct event date, in date order.
std::vector<ClusterLabel> classify_clusters(std::span<const EventRecord> calendar, int window_days = 3);

}  // namespace forkvol

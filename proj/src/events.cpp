#include "forkvol/events.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "forkvol/errors.hpp"

namespace forkvol {

std::string_view to_string(ForkKind kind) {
  switch (kind) {
    case ForkKind::hard: return "hard";
    case ForkKind::soft: return "soft";
    case ForkKind::unknown: return "unknown";
  }
  return "unknown";
}

ForkKind parse_fork_kind(std::string_view text) {
  if (text == "hard") return ForkKind::hard;
  if (text == "soft") return ForkKind::soft;
  if (text == "unknown") return ForkKind::unknown;
  throw InputError("unknown fork kind '" + std::string(text) + "' (expected hard|soft|unknown)");
}

std::string_view to_string(DatePolicy p) { return p == DatePolicy::drop ? "drop" : "next_day"; }

DatePolicy parse_date_policy(std::string_view text) {
  if (text == "drop") return DatePolicy::drop;
  if (text == "next_day" || text == "next-day") return DatePolicy::next_day;
  throw UsageError("unknown date policy '" + std::string(text) + "' (expected drop|next_day)");
}

std::string_view to_string(RegressorKind k) { return k == RegressorKind::dummy ? "dummy" : "count"; }

RegressorKind parse_regressor_kind(std::string_view text) {
  if (text == "dummy") return RegressorKind::dummy;
  if (text == "count") return RegressorKind::count;
  throw UsageError("unknown regressor '" + std::string(text) + "' (expected dummy|count)");
}

namespace {

// Minimal RFC 4180 field splitter: quoted fields may contain commas and "".
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back().push_back(c);
    }
  }
  return fields;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

EventCalendar parse_events(std::istream& in, std::string_view source_label) {
  const std::string where = source_label.empty() ? "" : std::string(source_label) + ": ";
  std::string raw;
  if (!std::getline(in, raw)) throw InputError(where + "empty event file (missing header)");
  if (!raw.empty() && raw.back() == '\r') raw.pop_back();
  if (raw.rfind("\xEF\xBB\xBF", 0) == 0) raw.erase(0, 3);
  if (raw != "date,name,ticker,kind") {
    throw InputError(where + "expected header 'date,name,ticker,kind' at line 1");
  }
  EventCalendar out;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (trim(raw).empty()) continue;
    auto fields = split_csv(raw);
    if (fields.size() != 4) {
      throw InputError(where + "malformed row at line " + std::to_string(line_no));
    }
    const auto date = Date::try_parse(trim(fields[0]));
    if (!date) throw InputError(where + "invalid date at line " + std::to_string(line_no));
    try {
      out.push_back({*date, trim(fields[1]), trim(fields[2]), parse_fork_kind(trim(fields[3]))});
    } catch (const InputError& e) {
      throw InputError(where + e.what() + " at line " + std::to_string(line_no));
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EventRecord& a, const EventRecord& b) { return a.date < b.date; });
  return out;
}

EventCalendar read_events(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open event file " + path.string());
  return parse_events(in, path.string());
}

void write_events(std::ostream& out, std::span<const EventRecord> calendar) {
  out << "date,name,ticker,kind\n";
  for (const auto& e : calendar) {
    out << e.date.iso() << ',' << quote_if_needed(e.name) << ',' << quote_if_needed(e.ticker) << ','
        << to_string(e.kind) << '\n';
  }
}

std::size_t EventRegressors::event_days() const {
  return static_cast<std::size_t>(std::count(dummy.begin(), dummy.end(), 1));
}

std::vector<double> EventRegressors::as_real(RegressorKind kind) const {
  const auto& src = kind == RegressorKind::dummy ? dummy : count;
  return {src.begin(), src.end()};
}

EventRegressors no_events(std::span<const Date> dates) {
  EventRegressors r;
  r.dates.assign(dates.begin(), dates.end());
  r.dummy.assign(dates.size(), 0);
  r.count.assign(dates.size(), 0);
  return r;
}

PlacedEvents place_events(std::span<const EventRecord> calendar, std::span<const Date> dates,
                          DatePolicy policy) {
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (!(dates[i - 1] < dates[i])) throw InputError("event placement: dates must be strictly increasing");
  }
  PlacedEvents out;
  for (const auto& e : calendar) {
    if (dates.empty() || e.date < dates.front() || dates.back() < e.date) {
      ++out.off_range;
      continue;
    }
    const auto it = std::lower_bound(dates.begin(), dates.end(), e.date);
    if (*it == e.date) {
      out.events.push_back(e);
    } else if (policy == DatePolicy::next_day) {
      EventRecord moved = e;
      moved.date = *it;
      out.events.push_back(std::move(moved));
    } else {
      ++out.dropped;
    }
  }
  return out;
}

EventRegressors build_regressors(std::span<const EventRecord> calendar, std::span<const Date> dates,
                                 DatePolicy policy) {
  const auto placed = place_events(calendar, dates, policy);
  EventRegressors r = no_events(dates);
  r.dropped = placed.dropped;
  r.off_range = placed.off_range;
  for (const auto& e : placed.events) {
    const auto idx = static_cast<std::size_t>(
        std::lower_bound(dates.begin(), dates.end(), e.date) - dates.begin());
    ++r.count[idx];
    r.dummy[idx] = 1;
  }
  return r;
}

EventCalendar filter_hard(std::span<const EventRecord> calendar) {
  EventCalendar out;
  std::copy_if(calendar.begin(), calendar.end(), std::back_inserter(out),
               [](const EventRecord& e) { return e.kind == ForkKind::hard; });
  return out;
}

std::vector<ClusterLabel> classify_clusters(std::span<const EventRecord> calendar, int window_days) {
  if (window_days < 1) throw UsageError("classify_clusters: window must be >= 1 day");
  std::map<Date, int> per_day;
  for (const auto& e : calendar) ++per_day[e.date];

  std::vector<ClusterLabel> out;
  out.reserve(per_day.size());
  for (auto it = per_day.begin(); it != per_day.end(); ++it) {
    const auto next = std::next(it);
    const bool followed =
        next != per_day.end() && it->first.days_until(next->first) <= window_days;
    out.push_back({it->first, followed, it->second});
  }
  return out;
}

}  // namespace forkvol

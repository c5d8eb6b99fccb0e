#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace echoscope {

using Timestamp = std::chrono::sys_seconds;

/// Parses ISO-8601 style instants: a date, optionally followed by 'T' or a
/// space and hh:mm[:ss[.frac]], optionally followed by 'Z' or an offset
/// (+hh:mm / +hhmm / +hh). Zoneless values are taken as UTC. Fractional
/// seconds are truncated.
std::optional<Timestamp> parse_iso8601(std::string_view s);

/// Parses integral or decimal seconds since the Unix epoch (floored).
std::optional<Timestamp> parse_epoch(std::string_view s);

/// Renders as YYYY-MM-DDThh:mm:ssZ.
std::string format_iso8601(Timestamp t);

/// Closed interval [start, end].
struct TimeWindow {
  Timestamp start;
  Timestamp end;

  bool valid() const noexcept { return start <= end; }
  bool contains(Timestamp t) const noexcept { return start <= t && t <= end; }
};

/// Parses "START..END" with both ends ISO-8601.
std::optional<TimeWindow> parse_window(std::string_view s);

}  // namespace echoscope

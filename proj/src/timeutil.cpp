#include "echoscope/timeutil.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>

#include <fmt/format.h>

#include "echoscope/text.hpp"

namespace echoscope {

namespace {

using namespace std::chrono;

// Reads exactly `width` digits at `pos`.
bool read_digits(std::string_view s, std::size_t& pos, int width, int& value) {
  if (pos + width > s.size()) return false;
  value = 0;
  for (int k = 0; k < width; ++k) {
    char c = s[pos + k];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  pos += width;
  return true;
}

}  // namespace

std::optional<Timestamp> parse_iso8601(std::string_view s) {
  s = text::trim(s);
  std::size_t pos = 0;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!read_digits(s, pos, 4, y)) return std::nullopt;
  if (pos >= s.size() || s[pos++] != '-') return std::nullopt;
  if (!read_digits(s, pos, 2, mo)) return std::nullopt;
  if (pos >= s.size() || s[pos++] != '-') return std::nullopt;
  if (!read_digits(s, pos, 2, d)) return std::nullopt;

  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;

  int offset_minutes = 0;
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ') return std::nullopt;
    ++pos;
    if (!read_digits(s, pos, 2, h)) return std::nullopt;
    if (pos >= s.size() || s[pos++] != ':') return std::nullopt;
    if (!read_digits(s, pos, 2, mi)) return std::nullopt;
    if (pos < s.size() && s[pos] == ':') {
      ++pos;
      if (!read_digits(s, pos, 2, sec)) return std::nullopt;
      if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
        ++pos;
        std::size_t start = pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
        if (pos == start) return std::nullopt;
      }
    }
    if (h > 23 || mi > 59 || sec > 59) return std::nullopt;
    if (pos < s.size()) {
      char z = s[pos];
      if (z == 'Z' || z == 'z') {
        ++pos;
      } else if (z == '+' || z == '-') {
        ++pos;
        int oh = 0, om = 0;
        if (!read_digits(s, pos, 2, oh)) return std::nullopt;
        if (pos < s.size()) {
          if (s[pos] == ':') ++pos;
          if (!read_digits(s, pos, 2, om)) return std::nullopt;
        }
        if (oh > 23 || om > 59) return std::nullopt;
        offset_minutes = (oh * 60 + om) * (z == '-' ? -1 : 1);
      } else {
        return std::nullopt;
      }
    }
    if (pos != s.size()) return std::nullopt;
  }

  auto t = sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} - minutes{offset_minutes};
  return time_point_cast<seconds>(t);
}

std::optional<Timestamp> parse_epoch(std::string_view s) {
  s = text::trim(s);
  if (s.empty()) return std::nullopt;
  std::int64_t whole = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), whole);
  if (ec == std::errc() && ptr == s.data() + s.size()) return Timestamp{seconds{whole}};
  double value = 0;
  auto [p2, ec2] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec2 != std::errc() || p2 != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  if (std::fabs(value) > 1e15) return std::nullopt;
  return Timestamp{seconds{static_cast<std::int64_t>(std::floor(value))}};
}

std::string format_iso8601(Timestamp t) {
  auto days = floor<std::chrono::days>(t);
  year_month_day ymd{days};
  hh_mm_ss hms{t - days};
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

std::optional<TimeWindow> parse_window(std::string_view s) {
  auto sep = s.find("..");
  if (sep == std::string_view::npos) return std::nullopt;
  auto a = parse_iso8601(s.substr(0, sep));
  auto b = parse_iso8601(s.substr(sep + 2));
  if (!a || !b) return std::nullopt;
  TimeWindow w{*a, *b};
  if (!w.valid()) return std::nullopt;
  return w;
}

}  // namespace echoscope

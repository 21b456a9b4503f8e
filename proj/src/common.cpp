#include "invlab/common.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <charconv>
#include <cmath>

namespace invlab {

ParseError::ParseError(const std::string& what, std::size_t line)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

std::string format_double(double value) {
  if (std::isnan(value)) return {};
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::string format_fixed(double value, int decimals) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                           std::chars_format::fixed, decimals);
  return std::string(buf.data(), res.ptr);
}

int decimals_for_tick(double tick) {
  double scale = 1.0;
  for (int d = 0; d <= 12; ++d) {
    const double scaled = tick * scale;
    if (std::abs(scaled - std::round(scaled)) <= 1e-9 * std::max(1.0, scaled)) return d;
    scale *= 10.0;
  }
  return 12;
}

Duration parse_duration(std::string_view text) {
  text = trim(text);
  std::size_t i = 0;
  while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) ++i;
  if (i == 0) throw ConfigError("invalid duration '" + std::string(text) + "'");
  const double value = parse_double(text.substr(0, i));
  const std::string_view unit = trim(text.substr(i));
  double seconds = 0.0;
  if (unit.empty() || unit == "m" || unit == "min") {
    seconds = value * 60.0;
  } else if (unit == "s" || unit == "sec") {
    seconds = value;
  } else if (unit == "ms") {
    seconds = value * 1e-3;
  } else if (unit == "h" || unit == "hr") {
    seconds = value * 3600.0;
  } else {
    throw ConfigError("invalid duration unit in '" + std::string(text) + "'");
  }
  if (!(seconds > 0.0)) throw ConfigError("duration must be positive: '" + std::string(text) + "'");
  return Duration(static_cast<std::int64_t>(std::llround(seconds * 1e9)));
}

std::string format_duration(Duration d) {
  const std::int64_t ns = d.count();
  if (ns % (3600 * kNanosPerSecond) == 0) return std::to_string(ns / (3600 * kNanosPerSecond)) + "h";
  if (ns % (60 * kNanosPerSecond) == 0) return std::to_string(ns / (60 * kNanosPerSecond)) + "m";
  if (ns % kNanosPerSecond == 0) return std::to_string(ns / kNanosPerSecond) + "s";
  return std::to_string(ns / 1'000'000) + "ms";
}

std::int64_t day_number(Timestamp t) {
  std::int64_t d = t / kNanosPerDay;
  if (t % kNanosPerDay < 0) --d;
  return d;
}

std::string date_string(std::int64_t day) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{day}}};
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf.data();
}

std::int64_t parse_date(std::string_view text) {
  text = trim(text);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    throw ParseError("invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
  using namespace std::chrono;
  const auto y = static_cast<int>(parse_int(text.substr(0, 4)));
  const auto m = static_cast<unsigned>(parse_int(text.substr(5, 2)));
  const auto d = static_cast<unsigned>(parse_int(text.substr(8, 2)));
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) throw ParseError("invalid date '" + std::string(text) + "'");
  return sys_days{ymd}.time_since_epoch().count();
}

int parse_clock_minutes(std::string_view text) {
  text = trim(text);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigError("invalid clock time '" + std::string(text) + "'");
  const auto h = parse_int(text.substr(0, colon));
  const auto m = parse_int(text.substr(colon + 1));
  if (h < 0 || m < 0 || m >= 60 || h * 60 + m > 1440)
    throw ConfigError("clock time out of range '" + std::string(text) + "'");
  return static_cast<int>(h * 60 + m);
}

std::string format_clock_minutes(int minutes) {
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "%02d:%02d", minutes / 60, minutes % 60);
  return buf.data();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty())
    throw ParseError("invalid number '" + std::string(text) + "'");
  return value;
}

std::int64_t parse_int(std::string_view text) {
  text = trim(text);
  std::int64_t value = 0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty())
    throw ParseError("invalid integer '" + std::string(text) + "'");
  return value;
}

}  // namespace invlab

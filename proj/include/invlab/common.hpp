// Shared vocabulary: timestamps, durations, error types and number formatting.
#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace invlab {

/// Nanoseconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;
using Duration = std::chrono::nanoseconds;

inline constexpr std::int64_t kNanosPerSecond = 1'000'000'000;
inline constexpr std::int64_t kSecondsPerDay = 86'400;
inline constexpr std::int64_t kNanosPerDay = kSecondsPerDay * kNanosPerSecond;

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Bad or incomplete configuration (maps to CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Arguments outside an operation's domain (N = 0, negative values, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A fit that cannot produce a meaningful answer.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Shortest decimal string that round-trips to the same double. Empty for NaN.
std::string format_double(double value);

/// Fixed-point rendering with `decimals` fraction digits.
std::string format_fixed(double value, int decimals);

/// Number of fraction digits needed to print multiples of `tick` exactly (max 12).
int decimals_for_tick(double tick);

/// Parses "30s", "5m", "5min", "1h", "90" (minutes) or "250ms".
Duration parse_duration(std::string_view text);

/// Compact label such as "5m", "2h", "30s".
std::string format_duration(Duration d);

/// Days since 1970-01-01 for a timestamp (floor division).
std::int64_t day_number(Timestamp t);

/// "YYYY-MM-DD" for a day number.
std::string date_string(std::int64_t day);

/// Inverse of date_string.
std::int64_t parse_date(std::string_view text);

/// "HH:MM" -> minutes after midnight. "24:00" is accepted.
int parse_clock_minutes(std::string_view text);

std::string format_clock_minutes(int minutes);

std::string_view trim(std::string_view s);

double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);

}  // namespace invlab

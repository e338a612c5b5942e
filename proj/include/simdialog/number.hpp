#ifndef SIMDIALOG_NUMBER_HPP
#define SIMDIALOG_NUMBER_HPP

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace simdialog {

/// Shortest decimal text that parses back to exactly the same double.
inline std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // fold -0 so output never shows "-0"
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

/// Strict parse: the whole text must be a finite decimal number.
inline std::optional<double> parse_number(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty() || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace simdialog

#endif  // SIMDIALOG_NUMBER_HPP

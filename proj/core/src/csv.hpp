#pragma once

// Minimal comma-separated line handling shared by the readers. Fields are not
// quoted; team and conference names must not contain commas.

#include <charconv>
#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hfa/error.hpp"

namespace hfa::csv {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    const auto field = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    out.emplace_back(trim(field));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

inline std::optional<long long> to_integer(std::string_view s) {
  s = trim(s);
  long long value = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (s.empty() || ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

inline std::optional<double> to_real(std::string_view s) {
  s = trim(s);
  double value = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (s.empty() || ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

/// Reads lines, skipping comments and blanks, and tracks 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!skippable(line)) return true;
    }
    return false;
  }

  std::size_t line_no() const { return line_no_; }

  /// Consumes the header and checks its leading columns.
  std::vector<std::string> expect_header(const std::vector<std::string>& required) {
    std::string line;
    if (!next(line)) throw ParseError(line_no_ == 0 ? 1 : line_no_, "missing header");
    auto cols = split(line);
    if (cols.size() < required.size()) {
      throw ParseError(line_no_, "header has " + std::to_string(cols.size()) + " columns, expected " +
                                     std::to_string(required.size()));
    }
    for (std::size_t i = 0; i < required.size(); ++i) {
      if (cols[i] != required[i]) {
        throw ParseError(line_no_, "header column " + std::to_string(i + 1) + " is '" + cols[i] +
                                       "', expected '" + required[i] + "'");
      }
    }
    return cols;
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace hfa::csv

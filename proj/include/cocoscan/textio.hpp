#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cocoscan::textio {

/// Shortest text that parses back to exactly `v`.
std::string format_double(double v);

/// Fixed-point rendering with `decimals` digits after the point.
std::string format_fixed(double v, int decimals);

/// Parses the whole of `s` as a double (no surrounding whitespace).
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// Whitespace-separated token reader for the flat model-file format. Errors
/// report the 1-based token position.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  std::string next();
  double next_double();
  std::size_t next_size();
  long long next_int();
  void expect(std::string_view keyword);
  std::vector<double> next_doubles(std::size_t count);

 private:
  std::istream& in_;
  std::size_t position_ = 0;
};

/// Space-separated round-trip values, newline-terminated.
void write_values(std::ostream& out, const double* values, std::size_t count);

}  // namespace cocoscan::textio

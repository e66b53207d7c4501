#include "cocoscan/textio.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cocoscan/error.hpp"

namespace cocoscan::textio {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string format_fixed(double v, int decimals) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                           std::chars_format::fixed, decimals);
  return std::string(buf.data(), res.ptr);
}

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  // from_chars rejects a leading '+', which is common in hand-written files.
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<long long> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingResource("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw MissingResource("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw MissingResource("write failed for '" + path + "'");
}

std::string TokenReader::next() {
  std::string tok;
  if (!(in_ >> tok)) {
    throw InvalidInput("model file truncated after token " + std::to_string(position_));
  }
  ++position_;
  return tok;
}

double TokenReader::next_double() {
  const auto tok = next();
  auto v = parse_double(tok);
  if (!v) {
    throw InvalidInput("model file: token " + std::to_string(position_) + " ('" + tok +
                       "') is not a number");
  }
  return *v;
}

long long TokenReader::next_int() {
  const auto tok = next();
  auto v = parse_int(tok);
  if (!v) {
    throw InvalidInput("model file: token " + std::to_string(position_) + " ('" + tok +
                       "') is not an integer");
  }
  return *v;
}

std::size_t TokenReader::next_size() {
  const auto v = next_int();
  if (v < 0) {
    throw InvalidInput("model file: token " + std::to_string(position_) +
                       " must be non-negative");
  }
  return static_cast<std::size_t>(v);
}

void TokenReader::expect(std::string_view keyword) {
  const auto tok = next();
  if (tok != keyword) {
    throw InvalidInput("model file: expected '" + std::string(keyword) + "' at token " +
                       std::to_string(position_) + ", found '" + tok + "'");
  }
}

std::vector<double> TokenReader::next_doubles(std::size_t count) {
  std::vector<double> v(count);
  for (auto& x : v) x = next_double();
  return v;
}

void write_values(std::ostream& out, const double* values, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    if (i) out << ' ';
    out << format_double(values[i]);
  }
  out << '\n';
}

}  // namespace cocoscan::textio

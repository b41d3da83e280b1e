#include "nlds/value.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace nlds {

std::string format_double(double d, int min_decimals) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d, std::chars_format::fixed);
  std::string s(buf.data(), ptr);
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    if (min_decimals <= 0) return s;
    s += '.';
    dot = s.size() - 1;
  }
  const auto decimals = static_cast<int>(s.size() - dot - 1);
  if (decimals < min_decimals) s.append(static_cast<std::size_t>(min_decimals - decimals), '0');
  return s;
}

std::string to_cypher_literal(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "null"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(const std::string& s) const {
      std::string out = "'";
      for (char c : s) {
        if (c == '\'' || c == '\\') out += '\\';
        out += c;
      }
      out += '\'';
      return out;
    }
  };
  return std::visit(Visitor{}, v);
}

std::string to_display_string(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_double(d, 0); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

namespace {

int rank(const Value& v) {
  if (is_null(v)) return 0;
  if (std::holds_alternative<std::string>(v)) return 2;
  return 1;
}

double as_number(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

}  // namespace

int compare_values(const Value& a, const Value& b) {
  const int ra = rank(a);
  const int rb = rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  if (ra == 0) return 0;
  if (ra == 2) {
    const int c = std::get<std::string>(a).compare(std::get<std::string>(b));
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
    const auto x = std::get<std::int64_t>(a);
    const auto y = std::get<std::int64_t>(b);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  const double x = as_number(a);
  const double y = as_number(b);
  return x < y ? -1 : (x > y ? 1 : 0);
}

}  // namespace nlds

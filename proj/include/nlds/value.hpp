#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>

namespace nlds {

/// Scalar cell used for node properties and result tables.
/// std::monostate is the null value and is never stored as a property.
using Value = std::variant<std::monostate, std::int64_t, double, std::string>;

using PropertyMap = std::map<std::string, Value>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

/// Cypher-ish literal rendering: strings single-quoted, null as "null".
std::string to_cypher_literal(const Value& v);

/// Plain text rendering used for CSV cells and table printing.
std::string to_display_string(const Value& v);

/// Shortest round-tripping decimal text that keeps at least `min_decimals` digits.
std::string format_double(double d, int min_decimals = 1);

/// Total order used by ORDER BY: null < numbers < strings.
int compare_values(const Value& a, const Value& b);

}  // namespace nlds

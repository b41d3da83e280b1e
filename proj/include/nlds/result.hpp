#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nlds/value.hpp"

namespace nlds {

/// Tabular query output. Every row has one cell per column.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;

  bool operator==(const ResultTable&) const = default;

  /// RFC 4180 text with a header row and CRLF line ends.
  [[nodiscard]] std::string to_csv() const;
  /// {"columns": [...], "rows": [[...], ...]}
  [[nodiscard]] nlohmann::json to_json() const;
  static ResultTable from_json(const nlohmann::json& j);
};

nlohmann::json value_to_json(const Value& v);
Value value_from_json(const nlohmann::json& j);

}  // namespace nlds

#include "nlds/result.hpp"

#include <sstream>

#include "nlds/csv.hpp"
#include "nlds/errors.hpp"

namespace nlds {

nlohmann::json value_to_json(const Value& v) {
  struct Visitor {
    nlohmann::json operator()(std::monostate) const { return nullptr; }
    nlohmann::json operator()(std::int64_t i) const { return i; }
    nlohmann::json operator()(double d) const { return d; }
    nlohmann::json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

Value value_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw ValidationError("result cells must be null, numbers or strings");
}

std::string ResultTable::to_csv() const {
  std::ostringstream out;
  csv::write_row(out, columns);
  for (const auto& row : rows) {
    csv::Row cells;
    cells.reserve(row.size());
    for (const auto& v : row) cells.push_back(to_display_string(v));
    csv::write_row(out, cells);
  }
  return out.str();
}

nlohmann::json ResultTable::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& v : row) r.push_back(value_to_json(v));
    rows_json.push_back(std::move(r));
  }
  return {{"columns", columns}, {"rows", std::move(rows_json)}};
}

ResultTable ResultTable::from_json(const nlohmann::json& j) {
  ResultTable t;
  t.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& r : j.at("rows")) {
    std::vector<Value> row;
    for (const auto& cell : r) row.push_back(value_from_json(cell));
    if (row.size() != t.columns.size()) throw ValidationError("row arity differs from column count");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace nlds

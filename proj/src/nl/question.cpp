#include "nlds/question.hpp"

#include <sstream>

#include "nlds/value.hpp"

namespace nlds {

std::string_view to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::PageRank:
      return "PageRank";
    case AlgorithmKind::DegreeCentrality:
      return "DegreeCentrality";
    case AlgorithmKind::LabelPropagation:
      return "LabelPropagation";
  }
  return "?";
}

std::optional<AlgorithmKind> algorithm_from_string(std::string_view name) {
  for (auto k : {AlgorithmKind::PageRank, AlgorithmKind::DegreeCentrality,
                 AlgorithmKind::LabelPropagation}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

const std::vector<std::string>& production_names() {
  static const std::vector<std::string> names = {
      "Selection",  "Projection",     "SelectionProjection", "Aggregation",
      "ViewCreation", "EstimateMemory", "Centrality",          "Community"};
  return names;
}

std::string_view production_name(const QuestionAST& ast) {
  return production_names()[ast.index()];
}

namespace {

void conditions(std::ostream& out, const std::vector<Condition>& conds) {
  out << '[';
  for (std::size_t i = 0; i < conds.size(); ++i) {
    if (i) out << ", ";
    out << conds[i].first << '=' << to_cypher_literal(conds[i].second);
  }
  out << ']';
}

template <typename T>
void opt(std::ostream& out, const std::optional<T>& v) {
  if (!v) {
    out << "none";
  } else if constexpr (std::is_same_v<T, double>) {
    out << format_double(*v, 2);
  } else {
    out << *v;
  }
}

}  // namespace

std::string describe(const QuestionAST& ast) {
  std::ostringstream out;
  out << production_name(ast) << '(';
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, ast::Selection> || std::is_same_v<T, ast::Aggregation>) {
          out << a.label << ", ";
          conditions(out, a.conditions);
        } else if constexpr (std::is_same_v<T, ast::Projection>) {
          out << a.label << ", " << a.property;
        } else if constexpr (std::is_same_v<T, ast::SelectionProjection>) {
          out << a.source_label << ", " << a.source_property << ", " << a.target_label << ", ";
          conditions(out, a.target_conditions);
        } else if constexpr (std::is_same_v<T, ast::ViewCreation>) {
          opt(out, a.base_graph);
          out << ", ";
          opt(out, a.view_name);
          out << ", " << a.node_label << ", " << a.rel_type << ", "
              << (a.oriented ? "oriented" : "unoriented");
        } else if constexpr (std::is_same_v<T, ast::EstimateMemory>) {
          out << to_string(a.algorithm) << ", " << a.view_name;
        } else if constexpr (std::is_same_v<T, ast::Centrality>) {
          out << '"' << a.keyword << "\", " << a.node_label << ", " << a.rel_type << ", ";
          opt(out, a.graph_name);
          out << ", ";
          opt(out, a.max_iterations);
          out << ", ";
          opt(out, a.damping_factor);
        } else if constexpr (std::is_same_v<T, ast::Community>) {
          out << '"' << a.keyword << "\", " << a.node_label << ", ";
          opt(out, a.view_name);
          out << ", " << a.rel_type << ", ";
          opt(out, a.max_iterations);
        }
      },
      ast);
  out << ')';
  return out.str();
}

}  // namespace nlds

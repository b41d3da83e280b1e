#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace nlds {

enum class AlgorithmKind { PageRank, DegreeCentrality, LabelPropagation };

std::string_view to_string(AlgorithmKind kind);
std::optional<AlgorithmKind> algorithm_from_string(std::string_view name);

/// (property, value) equality filter.
using Condition = std::pair<std::string, std::string>;

namespace ast {

struct Selection {
  std::string label;
  std::vector<Condition> conditions;
  bool operator==(const Selection&) const = default;
};

struct Projection {
  std::string label;
  std::string property;
  bool operator==(const Projection&) const = default;
};

struct SelectionProjection {
  std::string source_label;
  std::string source_property;
  std::string target_label;
  std::vector<Condition> target_conditions;
  bool operator==(const SelectionProjection&) const = default;
};

struct Aggregation {
  std::string label;
  std::vector<Condition> conditions;
  bool operator==(const Aggregation&) const = default;
};

struct ViewCreation {
  std::optional<std::string> base_graph;
  std::optional<std::string> view_name;
  std::string node_label;
  std::string rel_type;
  bool oriented = false;
  bool operator==(const ViewCreation&) const = default;
};

struct EstimateMemory {
  AlgorithmKind algorithm = AlgorithmKind::PageRank;
  std::string view_name;
  bool operator==(const EstimateMemory&) const = default;
};

struct Centrality {
  std::string keyword;
  std::string node_label;
  std::string rel_type;
  std::optional<std::string> graph_name;
  std::optional<std::int64_t> max_iterations;
  std::optional<double> damping_factor;
  bool operator==(const Centrality&) const = default;
};

struct Community {
  std::string keyword;
  std::string node_label;
  std::optional<std::string> view_name;
  std::string rel_type;
  std::optional<std::int64_t> max_iterations;
  bool operator==(const Community&) const = default;
};

}  // namespace ast

/// Expression tree of one parsed question; alternatives follow grammar
/// production order.
using QuestionAST = std::variant<ast::Selection, ast::Projection, ast::SelectionProjection,
                                 ast::Aggregation, ast::ViewCreation, ast::EstimateMemory,
                                 ast::Centrality, ast::Community>;

/// Production name of the active alternative, e.g. "Centrality".
std::string_view production_name(const QuestionAST& ast);

/// All production names, in grammar order.
const std::vector<std::string>& production_names();

/// Single-line rendering, stable across runs; used for ordering and display.
std::string describe(const QuestionAST& ast);

}  // namespace nlds

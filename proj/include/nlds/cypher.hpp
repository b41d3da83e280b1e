#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "nlds/errors.hpp"
#include "nlds/value.hpp"

/// The Cypher subset emitted by the query generator: single MATCH patterns
/// with inline property maps, WITH/RETURN projections with count(), ORDER BY,
/// LIMIT, and the gds.* procedure calls used by the analytics pipelines.
namespace nlds::cypher {

struct NodePattern {
  std::string var;    // empty for ()
  std::string label;  // empty when unlabeled
  std::vector<std::pair<std::string, Value>> properties;
  bool operator==(const NodePattern&) const = default;
};

enum class Direction { Outgoing, Incoming, Both };

struct RelPattern {
  std::string var;
  std::string type;  // empty matches any type
  Direction direction = Direction::Outgoing;
  bool variable_length = false;
  bool operator==(const RelPattern&) const = default;
};

struct Expr {
  enum class Kind {
    Variable,        // x
    Property,        // x.KEY
    Id,              // id(x)
    Count,           // count(x)
    CountStar,       // count(*)
    AsNodeProperty,  // gds.util.asNode(x).KEY
    Literal,
  };
  Kind kind = Kind::Variable;
  std::string var;
  std::string key;
  Value literal;
  bool parenthesized = false;

  [[nodiscard]] bool is_aggregate() const { return kind == Kind::Count || kind == Kind::CountStar; }
  bool operator==(const Expr&) const = default;
};

struct ProjectItem {
  Expr expr;
  std::optional<std::string> alias;
  /// Output column name: the alias, else the expression text.
  [[nodiscard]] std::string column() const;
  bool operator==(const ProjectItem&) const = default;
};

struct MapEntry;

/// Procedure argument: a scalar or a (possibly nested) map literal.
struct Argument {
  Value scalar;
  std::vector<MapEntry> map;
  bool is_map = false;

  [[nodiscard]] const Argument* get(std::string_view key) const;
  bool operator==(const Argument&) const;
};

struct MapEntry {
  std::string key;
  Argument value;
  bool operator==(const MapEntry&) const = default;
};

// Pipeline steps.

struct NodeScan {
  NodePattern node;
  bool operator==(const NodeScan&) const = default;
};

struct PathMatch {
  std::vector<NodePattern> nodes;  // nodes.size() == rels.size() + 1
  std::vector<RelPattern> rels;
  bool operator==(const PathMatch&) const = default;
};

struct ProcedureCall {
  std::string name;  // canonical, e.g. "gds.pageRank.stream"
  std::vector<Argument> args;
  std::vector<std::string> yields;
  bool explicit_yield = false;
  bool operator==(const ProcedureCall&) const = default;
};

/// WITH or RETURN without aggregates.
struct Project {
  std::vector<ProjectItem> items;
  bool is_with = false;
  bool operator==(const Project&) const = default;
};

/// WITH or RETURN containing count(); non-aggregate items are grouping keys.
struct Aggregate {
  std::vector<ProjectItem> items;
  bool is_with = false;
  bool operator==(const Aggregate&) const = default;
};

struct OrderLimit {
  std::optional<Expr> key;
  bool descending = false;
  std::optional<std::int64_t> limit;
  bool operator==(const OrderLimit&) const = default;
};

using Step = std::variant<NodeScan, PathMatch, ProcedureCall, Project, Aggregate, OrderLimit>;

/// One statement as an ordered pipeline of steps.
struct QueryPlan {
  std::vector<Step> steps;
  bool operator==(const QueryPlan&) const = default;
};

/// Output columns of each supported procedure, in YIELD order.
const std::vector<std::string>* procedure_columns(std::string_view canonical_name);

/// Parses exactly one statement (a trailing ';' is allowed). Throws
/// CypherSubsetError with the offending span.
QueryPlan parse_cypher(std::string_view text);

/// Parses a script of one or more statements separated by ';' or simply
/// following each other.
std::vector<QueryPlan> parse_script(std::string_view text);

/// Canonical text of a plan; parse_cypher(render(p)) == p.
std::string render(const QueryPlan& plan);
std::string render(const Expr& expr);

}  // namespace nlds::cypher

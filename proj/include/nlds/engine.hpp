#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nlds/cypher.hpp"
#include "nlds/graph.hpp"
#include "nlds/question.hpp"
#include "nlds/result.hpp"

namespace nlds {

/// In-memory projection of one node label and one relationship type.
/// Members are every node of the label; a relationship is kept only if both
/// endpoints are members. UNDIRECTED views store each edge in both directions.
struct GraphView {
  std::string name;
  std::string node_label;
  std::string rel_type;
  Orientation orientation = Orientation::Natural;
  std::vector<NodeId> nodes;                      // dense index -> graph node id
  std::unordered_map<NodeId, std::size_t> index;  // graph node id -> dense index
  std::vector<std::vector<std::size_t>> adjacency;

  [[nodiscard]] std::size_t node_count() const { return nodes.size(); }
  /// Adjacency entries; an undirected edge counts twice.
  [[nodiscard]] std::size_t relationship_count() const;
  [[nodiscard]] bool same_definition(const GraphView& other) const {
    return node_label == other.node_label && rel_type == other.rel_type && orientation == other.orientation;
  }
};

/// Throws ViewDefinitionError when the label or type does not occur in the graph.
GraphView build_view(std::string name, const std::string& node_label, const std::string& rel_type,
                     Orientation orientation, const PropertyGraph& graph);

/// Named views of one session. create/lookup may be called from several threads.
class ViewCatalog {
 public:
  /// Throws ViewExists if the name is taken.
  std::shared_ptr<const GraphView> create(GraphView view);
  /// Throws ViewNotFound.
  [[nodiscard]] std::shared_ptr<const GraphView> find(const std::string& name) const;
  [[nodiscard]] bool contains(const std::string& name) const;
  [[nodiscard]] std::set<std::string> names() const;
  bool drop(const std::string& name);

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const GraphView>> views_;
};

struct MemoryEstimate {
  std::int64_t node_count = 0;
  std::int64_t relationship_count = 0;
  std::int64_t bytes_min = 0;
  std::int64_t bytes_max = 0;
  std::string required_memory;  // "[<min> Bytes ... <max> Bytes]"

  bool operator==(const MemoryEstimate&) const = default;
};

/// 40 bytes per node, 24 per relationship, 8 per node for the result value;
/// the maximum doubles the minimum. Same sizing for every algorithm.
MemoryEstimate estimate_memory(std::int64_t node_count, std::int64_t relationship_count);
MemoryEstimate estimate_memory(const GraphView& view, AlgorithmKind algorithm);

struct ScoredNode {
  NodeId node = 0;
  double score = 0.0;
};

struct PageRankResult {
  std::vector<ScoredNode> scores;  // ascending node id
  std::int64_t iterations = 0;
  bool converged = false;
};

/// Synchronous power iteration from 1/N. Mass of nodes without out-edges is
/// spread uniformly. Stops after `max_iterations` or once the L1 change drops
/// below 1e-7. Throws ValidationError for max_iterations < 1 or damping
/// outside (0, 1).
PageRankResult pagerank(const GraphView& view, std::int64_t max_iterations, double damping);

inline constexpr double kPageRankTolerance = 1e-7;

struct LabelPropagationResult {
  std::vector<std::pair<NodeId, std::int64_t>> assignments;  // (node id, community id), ascending node id
  std::int64_t iterations = 0;
  bool converged = false;

  [[nodiscard]] std::size_t community_count() const;
};

/// Labels start as node ids. Each round visits nodes in ascending order and
/// gives each the most frequent label among its neighbours, smallest label on
/// ties; later nodes see the labels assigned earlier in the same round.
/// Nodes without neighbours keep their own label.
LabelPropagationResult label_propagation(const GraphView& view, std::int64_t max_iterations);

/// Rows (id(n), degree) for label nodes with at least one incident `rel_type`
/// relationship, degree descending then id ascending.
ResultTable degree_centrality(const PropertyGraph& graph, const std::string& label, const std::string& rel_type);

/// Output of one statement.
struct ExecutionResult {
  ResultTable table;
  std::optional<MemoryEstimate> estimate;
};

struct ExecuteOptions {
  /// Treat gds.graph.create of an existing view with the same definition as a no-op.
  bool reuse_identical_views = false;
};

/// Runs one statement. Unknown labels, types or properties produce empty
/// results; unknown views raise ViewNotFound.
ExecutionResult execute(const cypher::QueryPlan& plan, const PropertyGraph& graph, ViewCatalog& views,
                        const ExecuteOptions& options = {});

struct StatementEstimate {
  std::size_t statement_index = 0;
  MemoryEstimate estimate;
  bool operator==(const StatementEstimate&) const = default;
};

struct ScriptResult {
  ResultTable table;  // output of the last statement
  std::vector<StatementEstimate> estimates;
};

/// Parses and runs the statements in order. Any failure is rethrown as
/// ExecutionError carrying the statement index and the original error class.
ScriptResult execute_script(const std::vector<std::string>& statements, const PropertyGraph& graph,
                            ViewCatalog& views, const ExecuteOptions& options = {});
/// Same for free text holding one or more statements.
ScriptResult execute_script(std::string_view text, const PropertyGraph& graph, ViewCatalog& views,
                            const ExecuteOptions& options = {});

nlohmann::json estimate_to_json(const MemoryEstimate& e);

}  // namespace nlds

#include <algorithm>
#include <cmath>
#include <map>

#include "nlds/engine.hpp"
#include "nlds/errors.hpp"

namespace nlds {

PageRankResult pagerank(const GraphView& view, std::int64_t max_iterations, double damping) {
  if (max_iterations < 1) throw ValidationError("maxIterations must be at least 1");
  if (!(damping > 0.0 && damping < 1.0)) throw ValidationError("dampingFactor must lie strictly between 0 and 1");

  PageRankResult result;
  const std::size_t n = view.node_count();
  if (n == 0) return result;

  const double nd = static_cast<double>(n);
  std::vector<double> rank(n, 1.0 / nd);
  std::vector<double> next(n);
  for (std::int64_t it = 0; it < max_iterations; ++it) {
    double dangling = 0.0;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t u = 0; u < n; ++u) {
      const auto& out = view.adjacency[u];
      if (out.empty()) {
        dangling += rank[u];
        continue;
      }
      const double share = rank[u] / static_cast<double>(out.size());
      for (std::size_t v : out) next[v] += share;
    }
    const double base = (1.0 - damping) / nd + damping * dangling / nd;
    double delta = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] = base + damping * next[v];
      delta += std::abs(next[v] - rank[v]);
    }
    rank.swap(next);
    result.iterations = it + 1;
    if (delta < kPageRankTolerance) {
      result.converged = true;
      break;
    }
  }

  result.scores.reserve(n);
  for (std::size_t i = 0; i < n; ++i) result.scores.push_back({view.nodes[i], rank[i]});
  return result;
}

std::size_t LabelPropagationResult::community_count() const {
  std::vector<std::int64_t> labels;
  labels.reserve(assignments.size());
  for (const auto& [node, label] : assignments) labels.push_back(label);
  std::sort(labels.begin(), labels.end());
  return static_cast<std::size_t>(std::unique(labels.begin(), labels.end()) - labels.begin());
}

LabelPropagationResult label_propagation(const GraphView& view, std::int64_t max_iterations) {
  if (max_iterations < 1) throw ValidationError("maxIterations must be at least 1");
  LabelPropagationResult result;
  const std::size_t n = view.node_count();
  if (n == 0) return result;

  std::vector<std::int64_t> label(view.nodes.begin(), view.nodes.end());
  std::map<std::int64_t, std::int64_t> votes;
  for (std::int64_t it = 0; it < max_iterations; ++it) {
    // Nodes update in index order and see labels already changed this round.
    bool changed = false;
    for (std::size_t v = 0; v < n; ++v) {
      if (view.adjacency[v].empty()) continue;
      votes.clear();
      for (std::size_t u : view.adjacency[v]) ++votes[label[u]];
      auto best = votes.begin();
      for (auto c = votes.begin(); c != votes.end(); ++c) {
        if (c->second > best->second) best = c;
      }
      if (best->first != label[v]) {
        label[v] = best->first;
        changed = true;
      }
    }
    result.iterations = it + 1;
    if (!changed) {
      result.converged = true;
      break;
    }
  }

  result.assignments.reserve(n);
  for (std::size_t i = 0; i < n; ++i) result.assignments.emplace_back(view.nodes[i], label[i]);
  return result;
}

ResultTable degree_centrality(const PropertyGraph& graph, const std::string& label, const std::string& rel_type) {
  std::vector<std::pair<NodeId, std::int64_t>> degrees;
  for (NodeId id : graph.nodes_with_label(label)) {
    std::int64_t d = 0;
    for (RelId r : graph.outgoing(id)) d += graph.relationship(r).type == rel_type;
    for (RelId r : graph.incoming(id)) d += graph.relationship(r).type == rel_type;
    if (d > 0) degrees.emplace_back(id, d);
  }
  std::stable_sort(degrees.begin(), degrees.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  ResultTable table;
  table.columns = {"id(n)", "degree"};
  for (const auto& [id, d] : degrees) table.rows.push_back({Value{id}, Value{d}});
  return table;
}

}  // namespace nlds

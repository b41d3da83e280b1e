#pragma once

// Reference implementations used by the unit and acceptance tests. None of
// them call into the library's algorithms; they only share the graph types.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nlds/graph.hpp"

namespace oracle {

// Minimal CSV reader: quoted fields with doubled quotes, LF or CRLF.
inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(field);
      field.clear();
      rows.push_back(row);
      row.clear();
    } else {
      field += c;
    }
  }
  if (!field.empty() || !row.empty()) {
    row.push_back(field);
    rows.push_back(row);
  }
  return rows;
}

// Data rows of `file` whose `column` equals `value`.
inline std::size_t csv_count(const std::filesystem::path& file, const std::string& column,
                             const std::string& value) {
  const auto rows = read_csv(file);
  if (rows.empty()) return 0;
  const auto& header = rows.front();
  const auto it = std::find(header.begin(), header.end(), column);
  if (it == header.end()) return 0;
  const auto col = static_cast<std::size_t>(it - header.begin());
  std::size_t n = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (col < rows[r].size() && rows[r][col] == value) ++n;
  }
  return n;
}

inline std::size_t csv_data_rows(const std::filesystem::path& file) {
  const auto rows = read_csv(file);
  return rows.empty() ? 0 : rows.size() - 1;
}

// Directed edges among nodes 0..n-1.
struct Digraph {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

inline Digraph random_digraph(std::uint64_t seed, std::size_t max_nodes) {
  std::mt19937_64 rng(seed);
  Digraph g;
  g.n = 1 + rng() % max_nodes;
  const std::size_t m = rng() % (3 * g.n + 1);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t u = rng() % g.n;
    const std::size_t v = rng() % g.n;
    if (u != v) g.edges.emplace_back(u, v);
  }
  return g;
}

// Loads `g` as label "N" / type "E", interleaved with "X" nodes and "F" edges
// that a view over (N, E) must ignore. Returns the graph ids of the N nodes.
inline std::vector<nlds::NodeId> embed(const Digraph& g, nlds::PropertyGraph& graph, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<nlds::NodeId> ids;
  std::vector<nlds::NodeId> noise;
  for (std::size_t i = 0; i < g.n; ++i) {
    if (rng() % 3 == 0) noise.push_back(graph.add_node("X"));
    ids.push_back(graph.add_node("N", {{"DESCRIPTION", std::string("n") + std::to_string(i)}}));
  }
  noise.push_back(graph.add_node("X"));
  for (const auto& [u, v] : g.edges) graph.add_relationship("E", ids[u], ids[v]);
  for (std::size_t i = 0; i < g.n; ++i) {
    graph.add_relationship("F", ids[i], ids[(i + 1) % g.n]);
    graph.add_relationship("E", ids[i], noise[rng() % noise.size()]);
  }
  return ids;
}

// Dense power iteration: x' = (1-d)/N + d * M x, where M[v][u] = (#u->v) / outdeg(u)
// and columns of dangling nodes are 1/N. Same stopping rule as the engine's
// contract: `max_iterations` rounds or an L1 change below `tolerance`.
inline std::vector<double> pagerank_dense(const Digraph& g, int max_iterations, double d, double tolerance) {
  const std::size_t n = g.n;
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  std::vector<double> outdeg(n, 0.0);
  for (const auto& [u, v] : g.edges) outdeg[u] += 1.0;
  for (const auto& [u, v] : g.edges) m[v][u] += 1.0 / outdeg[u];
  for (std::size_t u = 0; u < n; ++u) {
    if (outdeg[u] == 0.0) {
      for (std::size_t v = 0; v < n; ++v) m[v][u] = 1.0 / static_cast<double>(n);
    }
  }
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < max_iterations; ++it) {
    std::vector<double> y(n, (1.0 - d) / static_cast<double>(n));
    for (std::size_t v = 0; v < n; ++v) {
      double acc = 0.0;
      for (std::size_t u = 0; u < n; ++u) acc += m[v][u] * x[u];
      y[v] += d * acc;
    }
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) change += std::abs(y[v] - x[v]);
    x = std::move(y);
    if (change < tolerance) break;
  }
  return x;
}

// Label propagation over the undirected multigraph of `g`. Each round walks
// the nodes in index order, updating in place: a node takes the label with the
// most incident edge ends, the smallest such label on ties.
struct Propagation {
  std::vector<std::int64_t> labels;
  int rounds = 0;
  bool stable = false;
};

inline Propagation propagate(const Digraph& g, const std::vector<std::int64_t>& initial, int max_rounds) {
  Propagation p{initial, 0, false};
  std::vector<std::vector<std::size_t>> nbrs(g.n);
  for (const auto& [u, v] : g.edges) {
    nbrs[u].push_back(v);
    nbrs[v].push_back(u);
  }
  while (p.rounds < max_rounds) {
    bool changed = false;
    for (std::size_t v = 0; v < g.n; ++v) {
      if (nbrs[v].empty()) continue;
      std::map<std::int64_t, int> votes;
      for (auto u : nbrs[v]) votes[p.labels[u]] += 1;
      std::int64_t best = 0;
      int best_votes = -1;
      for (const auto& [label, count] : votes) {
        if (count > best_votes) {
          best = label;
          best_votes = count;
        }
      }
      if (best != p.labels[v]) {
        p.labels[v] = best;
        changed = true;
      }
    }
    ++p.rounds;
    if (!changed) {
      p.stable = true;
      break;
    }
  }
  return p;
}

// Connected components of the undirected version of `g`, as a component index per node.
inline std::vector<std::size_t> components(const Digraph& g) {
  std::vector<std::size_t> parent(g.n);
  for (std::size_t i = 0; i < g.n; ++i) parent[i] = i;
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [u, v] : g.edges) parent[root(u)] = root(v);
  std::vector<std::size_t> out(g.n);
  for (std::size_t i = 0; i < g.n; ++i) out[i] = root(i);
  return out;
}

// (node id, degree) for nodes of `label` touching at least one `type`
// relationship, by scanning every relationship once.
inline std::vector<std::pair<nlds::NodeId, std::int64_t>> degree_by_incidence(const nlds::PropertyGraph& graph,
                                                                              const std::string& label,
                                                                              const std::string& type) {
  std::map<nlds::NodeId, std::int64_t> degree;
  for (const auto& r : graph.relationships()) {
    if (r.type != type) continue;
    if (graph.node(r.source).label == label) ++degree[r.source];
    if (graph.node(r.target).label == label) ++degree[r.target];
  }
  std::vector<std::pair<nlds::NodeId, std::int64_t>> rows(degree.begin(), degree.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return rows;
}

// Random two-label graph for degree checks: labels A and B, types T and U.
inline nlds::PropertyGraph random_labelled_graph(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  nlds::PropertyGraph graph;
  const std::size_t n = 2 + rng() % 40;
  for (std::size_t i = 0; i < n; ++i) graph.add_node(rng() % 2 ? "A" : "B");
  const std::size_t m = rng() % (4 * n);
  for (std::size_t i = 0; i < m; ++i) {
    const auto u = static_cast<nlds::NodeId>(rng() % n);
    const auto v = static_cast<nlds::NodeId>(rng() % n);
    if (u != v) graph.add_relationship(rng() % 3 ? "T" : "U", u, v);
  }
  return graph;
}

// Text comparison used by the golden corpus: curly quotes become straight,
// whitespace collapses, spaces next to punctuation vanish, Cypher keywords
// are upper-cased, and statements are joined by a single space.
inline std::string normalize_cypher(std::string text) {
  for (std::size_t pos; (pos = text.find("\xE2\x80\x99")) != std::string::npos;) text.replace(pos, 3, "'");
  std::string collapsed;
  bool space = false;
  bool in_string = false;
  for (char c : text) {
    if (c == '\'') in_string = !in_string;
    if (!in_string && (std::isspace(static_cast<unsigned char>(c)) || c == ';')) {
      space = true;
      continue;
    }
    if (space && !collapsed.empty()) collapsed += ' ';
    space = false;
    collapsed += c;
  }
  static const std::string punct = "(){}[],:.-<>*";
  std::string out;
  for (std::size_t i = 0; i < collapsed.size(); ++i) {
    const char c = collapsed[i];
    if (c == ' ') {
      const char prev = out.empty() ? ' ' : out.back();
      const char next = i + 1 < collapsed.size() ? collapsed[i + 1] : ' ';
      if (punct.find(prev) != std::string::npos || punct.find(next) != std::string::npos) continue;
    }
    out += c;
  }
  static const std::regex word(R"(\b(match|return|with|as|order|by|desc|asc|limit|call|yield)\b)",
                               std::regex::icase);
  std::string result;
  std::size_t last = 0;
  bool quoted = false;
  for (auto it = std::sregex_iterator(out.begin(), out.end(), word); it != std::sregex_iterator(); ++it) {
    const auto pos = static_cast<std::size_t>(it->position());
    for (std::size_t k = last; k < pos; ++k) {
      if (out[k] == '\'') quoted = !quoted;
    }
    result += out.substr(last, pos - last);
    std::string w = it->str();
    if (!quoted) {
      for (auto& ch : w) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    }
    result += w;
    last = pos + it->length();
  }
  result += out.substr(last);
  return result;
}

// The reference listings return `.name` from streamed nodes; the generator
// returns `.DESCRIPTION` for labels that have it.
inline std::string substitute_name_projection(std::string text) {
  const std::string from = ").name AS";
  for (std::size_t pos; (pos = text.find(from)) != std::string::npos;) text.replace(pos, from.size(), ").DESCRIPTION AS");
  return text;
}

}  // namespace oracle

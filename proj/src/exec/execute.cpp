#include <algorithm>
#include <map>

#include "nlds/engine.hpp"
#include "nlds/errors.hpp"

namespace nlds {

namespace {

using cypher::Argument;
using cypher::Expr;

constexpr std::size_t kMaxPathLength = 8;

struct Cell {
  enum class Kind { Scalar, Node, Rel };
  Kind kind = Kind::Scalar;
  Value value;
  std::int64_t id = 0;

  static Cell scalar(Value v) { return {Kind::Scalar, std::move(v), 0}; }
  static Cell node(NodeId id) { return {Kind::Node, {}, id}; }
  static Cell rel(RelId id) { return {Kind::Rel, {}, id}; }
};

int compare_cells(const Cell& a, const Cell& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (a.kind == Cell::Kind::Scalar) return compare_values(a.value, b.value);
  return a.id < b.id ? -1 : (a.id > b.id ? 1 : 0);
}

/// Working table. Columns past `visible` stay reachable for ORDER BY after a
/// plain RETURN but are not part of the output.
struct Frame {
  std::vector<std::string> columns;
  std::size_t visible = 0;
  std::vector<std::vector<Cell>> rows;

  [[nodiscard]] int column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return static_cast<int>(i);
    }
    return -1;
  }
};

std::string render_properties(const PropertyMap& props) {
  if (props.empty()) return "";
  std::string out = " {";
  bool first = true;
  for (const auto& [k, v] : props) {
    if (!first) out += ", ";
    first = false;
    out += k + ": " + to_cypher_literal(v);
  }
  return out + "}";
}

class Evaluator {
 public:
  Evaluator(const PropertyGraph& graph, ViewCatalog& views, const ExecuteOptions& options)
      : graph_(graph), views_(views), options_(options) {}

  ExecutionResult run(const cypher::QueryPlan& plan) {
    for (const auto& step : plan.steps) {
      std::visit([&](const auto& s) { apply(s); }, step);
    }
    ExecutionResult result;
    result.estimate = estimate_;
    result.table.columns.assign(frame_.columns.begin(), frame_.columns.begin() + static_cast<std::ptrdiff_t>(frame_.visible));
    result.table.rows.reserve(frame_.rows.size());
    for (const auto& row : frame_.rows) {
      std::vector<Value> out;
      out.reserve(frame_.visible);
      for (std::size_t i = 0; i < frame_.visible; ++i) out.push_back(to_value(row[i]));
      result.table.rows.push_back(std::move(out));
    }
    return result;
  }

 private:
  Value to_value(const Cell& c) const {
    switch (c.kind) {
      case Cell::Kind::Node: {
        const auto& n = graph_.node(c.id);
        return "(" + std::to_string(n.id) + ":" + n.label + render_properties(n.properties) + ")";
      }
      case Cell::Kind::Rel: {
        const auto& r = graph_.relationship(c.id);
        return "[" + std::to_string(r.id) + ":" + r.type + render_properties(r.properties) + "]";
      }
      case Cell::Kind::Scalar:
        break;
    }
    return c.value;
  }

  // -- MATCH ---------------------------------------------------------------

  bool node_matches(const cypher::NodePattern& p, NodeId id) const {
    const auto& n = graph_.node(id);
    if (!p.label.empty() && n.label != p.label) return false;
    for (const auto& [key, expected] : p.properties) {
      auto it = n.properties.find(key);
      if (it == n.properties.end() || is_null(expected) || compare_values(it->second, expected) != 0) return false;
    }
    return true;
  }

  void apply(const cypher::NodeScan& s) {
    frame_ = {};
    if (!s.node.var.empty()) frame_.columns.push_back(s.node.var);
    frame_.visible = frame_.columns.size();
    for (const auto& n : graph_.nodes()) {
      if (!node_matches(s.node, n.id)) continue;
      frame_.rows.push_back(s.node.var.empty() ? std::vector<Cell>{} : std::vector<Cell>{Cell::node(n.id)});
    }
  }

  struct Hop {
    RelId rel;
    NodeId to;
  };

  std::vector<Hop> hops(NodeId from, const cypher::RelPattern& r) const {
    std::vector<Hop> out;
    if (r.direction != cypher::Direction::Incoming) {
      for (RelId id : graph_.outgoing(from)) {
        const auto& rel = graph_.relationship(id);
        if (r.type.empty() || rel.type == r.type) out.push_back({id, rel.target});
      }
    }
    if (r.direction != cypher::Direction::Outgoing) {
      for (RelId id : graph_.incoming(from)) {
        const auto& rel = graph_.relationship(id);
        if (r.type.empty() || rel.type == r.type) out.push_back({id, rel.source});
      }
    }
    return out;
  }

  void apply(const cypher::PathMatch& s) {
    frame_ = {};
    // Pre-register variables so every row has the same arity.
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
      if (!s.nodes[i].var.empty() && frame_.column(s.nodes[i].var) < 0) frame_.columns.push_back(s.nodes[i].var);
      if (i < s.rels.size() && !s.rels[i].var.empty() && frame_.column(s.rels[i].var) < 0) {
        frame_.columns.push_back(s.rels[i].var);
      }
    }
    frame_.visible = frame_.columns.size();
    std::vector<bool> bound(frame_.columns.size(), false);
    std::vector<Cell> row(frame_.columns.size());
    std::vector<RelId> used;
    if (s.nodes[0].label.empty()) {
      for (const auto& n : graph_.nodes()) extend(s, 0, n.id, row, bound, used);
    } else {
      for (NodeId id : graph_.nodes_with_label(s.nodes[0].label)) extend(s, 0, id, row, bound, used);
    }
  }

  bool try_bind(const std::string& var, const Cell& c, std::vector<Cell>& row, std::vector<bool>& bound,
                bool& fresh) {
    fresh = false;
    if (var.empty()) return true;
    const auto col = static_cast<std::size_t>(frame_.column(var));
    if (bound[col]) return compare_cells(row[col], c) == 0;
    row[col] = c;
    bound[col] = true;
    fresh = true;
    return true;
  }

  void unbind(const std::string& var, std::vector<bool>& bound, bool fresh) {
    if (fresh) bound[static_cast<std::size_t>(frame_.column(var))] = false;
  }

  // Matches node pattern `i` at `id`, then continues along relationship `i`.
  void extend(const cypher::PathMatch& s, std::size_t i, NodeId id, std::vector<Cell>& row, std::vector<bool>& bound,
              std::vector<RelId>& used) {
    if (!node_matches(s.nodes[i], id)) return;
    bool fresh = false;
    if (!try_bind(s.nodes[i].var, Cell::node(id), row, bound, fresh)) return;
    if (i == s.rels.size()) {
      frame_.rows.push_back(row);
    } else if (s.rels[i].variable_length) {
      std::vector<NodeId> on_path{id};
      walk(s, i, id, 1, on_path, row, bound, used);
    } else {
      for (const auto& h : hops(id, s.rels[i])) {
        if (std::find(used.begin(), used.end(), h.rel) != used.end()) continue;
        bool rel_fresh = false;
        if (!try_bind(s.rels[i].var, Cell::rel(h.rel), row, bound, rel_fresh)) continue;
        used.push_back(h.rel);
        extend(s, i + 1, h.to, row, bound, used);
        used.pop_back();
        unbind(s.rels[i].var, bound, rel_fresh);
      }
    }
    unbind(s.nodes[i].var, bound, fresh);
  }

  // Variable-length segment: every simple path of length 1..kMaxPathLength.
  void walk(const cypher::PathMatch& s, std::size_t i, NodeId at, std::size_t depth, std::vector<NodeId>& on_path,
            std::vector<Cell>& row, std::vector<bool>& bound, std::vector<RelId>& used) {
    if (depth > kMaxPathLength) return;
    for (const auto& h : hops(at, s.rels[i])) {
      if (std::find(on_path.begin(), on_path.end(), h.to) != on_path.end()) continue;
      if (std::find(used.begin(), used.end(), h.rel) != used.end()) continue;
      used.push_back(h.rel);
      on_path.push_back(h.to);
      extend(s, i + 1, h.to, row, bound, used);
      walk(s, i, h.to, depth + 1, on_path, row, bound, used);
      on_path.pop_back();
      used.pop_back();
    }
  }

  // -- Projection ------------------------------------------------------------

  Cell lookup(const std::vector<Cell>& row, const std::string& var) const {
    const int col = frame_.column(var);
    if (col < 0) throw ValidationError("variable '" + var + "' is not defined");
    return row[static_cast<std::size_t>(col)];
  }

  Cell eval(const Expr& e, const std::vector<Cell>& row) const {
    switch (e.kind) {
      case Expr::Kind::Variable:
        return lookup(row, e.var);
      case Expr::Kind::Property: {
        const Cell c = lookup(row, e.var);
        const PropertyMap* props = nullptr;
        if (c.kind == Cell::Kind::Node) props = &graph_.node(c.id).properties;
        if (c.kind == Cell::Kind::Rel) props = &graph_.relationship(c.id).properties;
        if (!props) return Cell::scalar({});
        auto it = props->find(e.key);
        return Cell::scalar(it == props->end() ? Value{} : it->second);
      }
      case Expr::Kind::Id: {
        const Cell c = lookup(row, e.var);
        if (c.kind == Cell::Kind::Scalar) return Cell::scalar({});
        return Cell::scalar(c.id);
      }
      case Expr::Kind::AsNodeProperty: {
        const Cell c = lookup(row, e.var);
        const auto* id = std::get_if<std::int64_t>(&c.value);
        if (c.kind == Cell::Kind::Node) id = &c.id;
        if (!id || *id < 0 || static_cast<std::size_t>(*id) >= graph_.nodes().size()) return Cell::scalar({});
        const auto& props = graph_.node(*id).properties;
        auto it = props.find(e.key);
        return Cell::scalar(it == props.end() ? Value{} : it->second);
      }
      case Expr::Kind::Literal:
        return Cell::scalar(e.literal);
      case Expr::Kind::Count:
      case Expr::Kind::CountStar:
        break;
    }
    throw ValidationError("count() is only allowed in a projection");
  }

  void apply(const cypher::Project& s) {
    Frame next;
    for (const auto& item : s.items) next.columns.push_back(item.column());
    next.visible = next.columns.size();
    std::vector<std::size_t> carried;
    if (!s.is_with) {
      for (std::size_t i = 0; i < frame_.columns.size(); ++i) {
        if (next.column(frame_.columns[i]) < 0) {
          next.columns.push_back(frame_.columns[i]);
          carried.push_back(i);
        }
      }
    }
    next.rows.reserve(frame_.rows.size());
    for (const auto& row : frame_.rows) {
      std::vector<Cell> out;
      out.reserve(next.columns.size());
      for (const auto& item : s.items) out.push_back(eval(item.expr, row));
      for (std::size_t i : carried) out.push_back(row[i]);
      next.rows.push_back(std::move(out));
    }
    frame_ = std::move(next);
  }

  void apply(const cypher::Aggregate& s) {
    Frame next;
    for (const auto& item : s.items) next.columns.push_back(item.column());
    next.visible = next.columns.size();

    struct Group {
      std::vector<Cell> keys;
      std::vector<std::int64_t> counts;
    };
    std::vector<Group> groups;
    auto less = [](const std::vector<Cell>& a, const std::vector<Cell>& b) {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                          [](const Cell& x, const Cell& y) { return compare_cells(x, y) < 0; });
    };
    std::map<std::vector<Cell>, std::size_t, decltype(less)> index(less);

    std::size_t aggregates = 0;
    for (const auto& item : s.items) aggregates += item.expr.is_aggregate();

    for (const auto& row : frame_.rows) {
      std::vector<Cell> keys;
      for (const auto& item : s.items) {
        if (!item.expr.is_aggregate()) keys.push_back(eval(item.expr, row));
      }
      auto [it, inserted] = index.emplace(keys, groups.size());
      if (inserted) groups.push_back({std::move(keys), std::vector<std::int64_t>(aggregates, 0)});
      auto& g = groups[it->second];
      std::size_t a = 0;
      for (const auto& item : s.items) {
        if (!item.expr.is_aggregate()) continue;
        if (item.expr.kind == Expr::Kind::CountStar) {
          ++g.counts[a];
        } else {
          const Cell c = lookup(row, item.expr.var);
          if (c.kind != Cell::Kind::Scalar || !is_null(c.value)) ++g.counts[a];
        }
        ++a;
      }
    }
    // Aggregating without grouping keys over no rows still yields one row.
    if (groups.empty() && aggregates == s.items.size()) groups.push_back({{}, std::vector<std::int64_t>(aggregates, 0)});

    for (const auto& g : groups) {
      std::vector<Cell> out;
      std::size_t k = 0;
      std::size_t a = 0;
      for (const auto& item : s.items) {
        out.push_back(item.expr.is_aggregate() ? Cell::scalar(g.counts[a++]) : g.keys[k++]);
      }
      next.rows.push_back(std::move(out));
    }
    frame_ = std::move(next);
  }

  void apply(const cypher::OrderLimit& s) {
    if (s.key) {
      Expr bare = *s.key;
      bare.parenthesized = false;
      const int direct = frame_.column(cypher::render(bare));
      std::vector<std::pair<Cell, std::size_t>> keyed;
      keyed.reserve(frame_.rows.size());
      for (std::size_t i = 0; i < frame_.rows.size(); ++i) {
        keyed.emplace_back(direct >= 0 ? frame_.rows[i][static_cast<std::size_t>(direct)] : eval(bare, frame_.rows[i]), i);
      }
      std::stable_sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
        const int c = compare_cells(a.first, b.first);
        return s.descending ? c > 0 : c < 0;
      });
      std::vector<std::vector<Cell>> rows;
      rows.reserve(keyed.size());
      for (const auto& [cell, i] : keyed) rows.push_back(std::move(frame_.rows[i]));
      frame_.rows = std::move(rows);
    }
    if (s.limit && frame_.rows.size() > static_cast<std::size_t>(*s.limit)) {
      frame_.rows.resize(static_cast<std::size_t>(*s.limit));
    }
  }

  // -- Procedures ------------------------------------------------------------

  static std::string string_arg(const cypher::ProcedureCall& c, std::size_t i) {
    return std::get<std::string>(c.args.at(i).scalar);
  }

  static const Argument* config(const cypher::ProcedureCall& c, std::size_t i) {
    return c.args.size() > i ? &c.args[i] : nullptr;
  }

  static std::int64_t int_option(const Argument* cfg, const char* key, std::int64_t fallback) {
    const Argument* a = cfg ? cfg->get(key) : nullptr;
    if (!a) return fallback;
    const auto* v = std::get_if<std::int64_t>(&a->scalar);
    if (a->is_map || !v) throw ValidationError(std::string(key) + " must be an integer");
    return *v;
  }

  static double double_option(const Argument* cfg, const char* key, double fallback) {
    const Argument* a = cfg ? cfg->get(key) : nullptr;
    if (!a) return fallback;
    if (!a->is_map) {
      if (const auto* d = std::get_if<double>(&a->scalar)) return *d;
      if (const auto* i = std::get_if<std::int64_t>(&a->scalar)) return static_cast<double>(*i);
    }
    throw ValidationError(std::string(key) + " must be a number");
  }

  static std::int64_t iterations(const Argument* cfg, std::int64_t fallback) {
    const auto n = int_option(cfg, "maxIterations", fallback);
    if (n < 1) throw ValidationError("maxIterations must be at least 1");
    return n;
  }

  static double damping(const Argument* cfg) {
    const double d = double_option(cfg, "dampingFactor", 0.85);
    if (!(d > 0.0 && d < 1.0)) throw ValidationError("dampingFactor must lie strictly between 0 and 1");
    return d;
  }

  /// {TYPE: {orientation: 'X'}} -> (TYPE, orientation)
  static std::pair<std::string, Orientation> projection(const Argument& a) {
    if (!a.is_map || a.map.size() != 1 || !a.map[0].value.is_map) {
      throw ViewDefinitionError("relationship projection must look like {TYPE: {orientation: 'NATURAL'}}");
    }
    Orientation o = Orientation::Natural;
    for (const auto& e : a.map[0].value.map) {
      const auto* s = std::get_if<std::string>(&e.value.scalar);
      if (e.key != "orientation" || e.value.is_map || !s) {
        throw ViewDefinitionError("unsupported relationship projection key '" + e.key + "'");
      }
      o = orientation_from_string(*s);
    }
    return {a.map[0].key, o};
  }

  void set_estimate_rows(const MemoryEstimate& e, std::vector<std::vector<Cell>>& rows) {
    estimate_ = e;
    rows.push_back({Cell::scalar(e.node_count), Cell::scalar(e.relationship_count), Cell::scalar(e.bytes_min),
                    Cell::scalar(e.bytes_max), Cell::scalar(e.required_memory)});
  }

  void apply(const cypher::ProcedureCall& c) {
    const auto& all = *cypher::procedure_columns(c.name);
    std::vector<std::vector<Cell>> rows;

    if (c.name == "gds.graph.create") {
      const auto [type, orientation] = projection(c.args.at(2));
      GraphView view = build_view(string_arg(c, 0), string_arg(c, 1), type, orientation, graph_);
      std::shared_ptr<const GraphView> stored;
      if (options_.reuse_identical_views && views_.contains(view.name)) {
        stored = views_.find(view.name);
        if (!stored->same_definition(view)) {
          throw ViewExists("graph view '" + view.name + "' already exists with a different definition");
        }
      } else {
        stored = views_.create(std::move(view));
      }
      rows.push_back({Cell::scalar(stored->name), Cell::scalar(static_cast<std::int64_t>(stored->node_count())),
                      Cell::scalar(static_cast<std::int64_t>(stored->relationship_count()))});
    } else if (c.name == "gds.graph.create.estimate") {
      const auto [type, orientation] = projection(c.args.at(1));
      const GraphView view = build_view("", string_arg(c, 0), type, orientation, graph_);
      set_estimate_rows(estimate_memory(view, AlgorithmKind::PageRank), rows);
    } else if (c.name == "gds.pageRank.write.estimate") {
      const auto view = views_.find(string_arg(c, 0));
      iterations(config(c, 1), 20);
      damping(config(c, 1));
      set_estimate_rows(estimate_memory(*view, AlgorithmKind::PageRank), rows);
    } else if (c.name == "gds.labelPropagation.write.estimate") {
      const auto view = views_.find(string_arg(c, 0));
      iterations(config(c, 1), 10);
      set_estimate_rows(estimate_memory(*view, AlgorithmKind::LabelPropagation), rows);
    } else if (c.name == "gds.pageRank.stream") {
      const auto view = views_.find(string_arg(c, 0));
      const auto pr = pagerank(*view, iterations(config(c, 1), 20), damping(config(c, 1)));
      for (const auto& s : pr.scores) rows.push_back({Cell::scalar(s.node), Cell::scalar(s.score)});
    } else if (c.name == "gds.labelPropagation.stream") {
      const auto view = views_.find(string_arg(c, 0));
      const auto lp = label_propagation(*view, iterations(config(c, 1), 10));
      for (const auto& [node, community] : lp.assignments) rows.push_back({Cell::scalar(node), Cell::scalar(community)});
    } else {
      throw ValidationError("unsupported procedure " + c.name);
    }

    frame_ = {};
    std::vector<std::size_t> pick;
    for (const auto& y : c.yields) {
      pick.push_back(static_cast<std::size_t>(std::find(all.begin(), all.end(), y) - all.begin()));
      frame_.columns.push_back(y);
    }
    frame_.visible = frame_.columns.size();
    for (auto& r : rows) {
      std::vector<Cell> out;
      for (std::size_t i : pick) out.push_back(r[i]);
      frame_.rows.push_back(std::move(out));
    }
  }

  const PropertyGraph& graph_;
  ViewCatalog& views_;
  const ExecuteOptions& options_;
  Frame frame_;
  std::optional<MemoryEstimate> estimate_;
};

[[noreturn]] void rethrow_as_execution_error(std::size_t index) {
  try {
    throw;
  } catch (const ExecutionError&) {
    throw;
  } catch (const Error& e) {
    throw ExecutionError(index, error_kind(e), e.what());
  } catch (const std::out_of_range& e) {
    throw ExecutionError(index, "Error", e.what());
  }
}

}  // namespace

ExecutionResult execute(const cypher::QueryPlan& plan, const PropertyGraph& graph, ViewCatalog& views,
                        const ExecuteOptions& options) {
  return Evaluator(graph, views, options).run(plan);
}

namespace {

ScriptResult run_plans(const std::vector<cypher::QueryPlan>& plans, const PropertyGraph& graph, ViewCatalog& views,
                       const ExecuteOptions& options) {
  ScriptResult out;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    try {
      auto r = execute(plans[i], graph, views, options);
      if (r.estimate) out.estimates.push_back({i, *r.estimate});
      out.table = std::move(r.table);
    } catch (...) {
      rethrow_as_execution_error(i);
    }
  }
  return out;
}

}  // namespace

ScriptResult execute_script(const std::vector<std::string>& statements, const PropertyGraph& graph,
                            ViewCatalog& views, const ExecuteOptions& options) {
  if (statements.empty()) throw ValidationError("script has no statements");
  std::vector<cypher::QueryPlan> plans;
  for (std::size_t i = 0; i < statements.size(); ++i) {
    try {
      plans.push_back(cypher::parse_cypher(statements[i]));
    } catch (...) {
      rethrow_as_execution_error(i);
    }
  }
  return run_plans(plans, graph, views, options);
}

ScriptResult execute_script(std::string_view text, const PropertyGraph& graph, ViewCatalog& views,
                            const ExecuteOptions& options) {
  std::vector<cypher::QueryPlan> plans;
  try {
    plans = cypher::parse_script(text);
  } catch (const CypherSubsetError& e) {
    const auto upto = text.substr(0, std::min(e.span().start, text.size()));
    throw ExecutionError(static_cast<std::size_t>(std::count(upto.begin(), upto.end(), ';')), "CypherSubsetError",
                         e.what());
  }
  return run_plans(plans, graph, views, options);
}

}  // namespace nlds

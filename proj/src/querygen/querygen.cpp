#include "nlds/querygen.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "nlds/errors.hpp"
#include "nlds/value.hpp"

namespace nlds {

std::string_view to_string(CandidateKind kind) {
  return kind == CandidateKind::Navigational ? "Navigational" : "DataScience";
}

std::string QueryCandidate::feedback_kind() const {
  if (algorithm) return std::string(to_string(*algorithm));
  return std::string(to_string(kind));
}

std::string QueryCandidate::rendered() const {
  std::string out;
  for (std::size_t i = 0; i < script.size(); ++i) {
    if (i) out += ";\n";
    out += script[i];
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string candidate_id(const std::vector<std::string>& script) {
  QueryCandidate c;
  c.script = script;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(c.rendered())));
  return buf;
}

// ---------------------------------------------------------------------------

void FeedbackStore::record(const std::string& production, const std::string& kind, int stars) {
  if (stars < 1 || stars > 5) throw ValidationError("stars must be between 1 and 5");
  auto& t = tallies_[{production, kind}];
  t.sum += stars;
  t.count += 1;
}

std::optional<FeedbackStore::Tally> FeedbackStore::find(const std::string& production,
                                                        const std::string& kind) const {
  auto it = tallies_.find({production, kind});
  if (it == tallies_.end() || it->second.count == 0) return std::nullopt;
  return it->second;
}

std::vector<QueryCandidate> rank_candidates(std::vector<QueryCandidate> candidates,
                                            const FeedbackStore& feedback, const std::string& production) {
  for (auto& c : candidates) {
    auto tally = feedback.find(production, c.feedback_kind());
    c.score = tally ? tally->mean() : kDefaultScore;
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const QueryCandidate& a, const QueryCandidate& b) { return a.score > b.score; });
  return candidates;
}

std::set<AlgorithmKind> map_keyword_to_algorithms(const std::string& phrase, const Lexicon& lexicon) {
  const auto& table = lexicon.keyword_table();
  auto it = table.find(normalize_phrase(phrase));
  if (it == table.end()) throw KeywordError("unknown algorithm keyword '" + phrase + "'");
  return it->second;
}

// ---------------------------------------------------------------------------

namespace {

bool plain_identifier(const std::string& s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string ident(const std::string& s) { return plain_identifier(s) ? s : "`" + s + "`"; }

std::string quoted(const std::string& s) { return to_cypher_literal(Value{s}); }

std::string property_map(const std::vector<Condition>& conds) {
  if (conds.empty()) return "";
  std::string out = " {";
  for (std::size_t i = 0; i < conds.size(); ++i) {
    if (i) out += ", ";
    out += ident(conds[i].first) + ":" + quoted(conds[i].second);
  }
  return out + "}";
}

std::string conditions_text(const std::vector<Condition>& conds) {
  std::string out;
  for (std::size_t i = 0; i < conds.size(); ++i) {
    if (i) out += " and ";
    out += conds[i].first + " is " + quoted(conds[i].second);
  }
  return out;
}

constexpr const char* kEstimateYield = " YIELD nodeCount, relationshipCount, bytesMin, bytesMax, requiredMemory";

std::string create_view(const std::string& view, const std::string& label, const std::string& type,
                        Orientation o) {
  return "CALL gds.graph.create(" + quoted(view) + ", " + quoted(label) + ", {" + ident(type) +
         ": {orientation: '" + std::string(to_string(o)) + "'}})";
}

std::string pagerank_estimate(const std::string& view, std::int64_t iterations, double damping) {
  return "CALL gds.pageRank.write.estimate(" + quoted(view) + ", {writeProperty: 'pageRank', maxIterations: " +
         std::to_string(iterations) + ", dampingFactor: " + format_double(damping, 2) + "})" + kEstimateYield;
}

std::string label_propagation_estimate(const std::string& view) {
  return "CALL gds.labelPropagation.write.estimate(" + quoted(view) + ", {writeProperty: 'community'})" +
         kEstimateYield;
}

struct Pipeline {
  std::string view;
  std::string label;
  std::string type;
  Orientation orientation;
  std::optional<std::int64_t> iterations;
  std::optional<double> damping;
  bool view_exists;
};

class Generator {
 public:
  Generator(const GraphSchema& schema, const std::set<std::string>& views, const GenerationDefaults& d)
      : schema_(schema), views_(views), d_(d) {}

  std::vector<QueryCandidate> operator()(const ast::Selection& a) {
    return {navigational({"MATCH (n:" + ident(a.label) + property_map(a.conditions) + ") RETURN n"},
                         "Returns " + a.label + " nodes whose " + conditions_text(a.conditions) + ".")};
  }

  std::vector<QueryCandidate> operator()(const ast::Projection& a) {
    return {navigational({"MATCH (n:" + ident(a.label) + ") RETURN n." + ident(a.property)},
                         "Returns the " + a.property + " of every " + a.label + " node.")};
  }

  std::vector<QueryCandidate> operator()(const ast::SelectionProjection& a) {
    std::string ret = "n." + ident(a.source_property);
    std::set<std::string> seen;
    for (const auto& [prop, value] : a.target_conditions) {
      if (seen.insert(prop).second) ret += ", m." + ident(prop);
    }
    return {navigational(
        {"MATCH (n:" + ident(a.source_label) + ")-[*]->(m:" + ident(a.target_label) +
         property_map(a.target_conditions) + ") RETURN " + ret},
        "Returns the " + a.source_property + " of " + a.source_label + " nodes with a directed path to " +
            a.target_label + " nodes whose " + conditions_text(a.target_conditions) + ".")};
  }

  std::vector<QueryCandidate> operator()(const ast::Aggregation& a) {
    const auto what = a.conditions.empty() ? "all " + a.label + " nodes"
                                           : a.label + " nodes whose " + conditions_text(a.conditions);
    return {navigational({"MATCH (n:" + ident(a.label) + property_map(a.conditions) + ") RETURN count(n)"},
                         "Counts " + what + ".")};
  }

  std::vector<QueryCandidate> operator()(const ast::ViewCreation& a) {
    const auto view = a.view_name.value_or(d_.view_name);
    const auto o = a.oriented ? Orientation::Natural : Orientation::Undirected;
    std::vector<std::string> script;
    if (!views_.count(view)) script.push_back(create_view(view, a.node_label, a.rel_type, o));
    script.push_back("CALL gds.graph.create.estimate(" + quoted(a.node_label) + ", {" + ident(a.rel_type) +
                     ": {orientation: '" + std::string(to_string(o)) + "'}})" + kEstimateYield);
    std::string text = (views_.count(view) ? "Reuses" : "Creates") + std::string(" the graph view '") + view +
                       "' over " + a.node_label + " nodes and " + std::string(to_string(o)) + " " + a.rel_type +
                       " relationships";
    if (a.base_graph) text += " of " + *a.base_graph;
    text += ", then estimates its memory.";
    return {data_science(std::move(script), std::nullopt, std::move(text))};
  }

  std::vector<QueryCandidate> operator()(const ast::EstimateMemory& a) {
    std::string stmt = a.algorithm == AlgorithmKind::LabelPropagation
                           ? label_propagation_estimate(a.view_name)
                           : pagerank_estimate(a.view_name, d_.pagerank_iterations, d_.damping_factor);
    return {data_science({std::move(stmt)}, a.algorithm,
                         "Estimates the memory needed to run " + std::string(to_string(a.algorithm)) +
                             " on the graph view '" + a.view_name + "'.")};
  }

  std::vector<QueryCandidate> run_algorithms(const std::set<AlgorithmKind>& algorithms, const Pipeline& p) {
    std::vector<QueryCandidate> out;
    for (auto algorithm : algorithms) {
      switch (algorithm) {
        case AlgorithmKind::DegreeCentrality:
          out.push_back(degree(p));
          break;
        case AlgorithmKind::PageRank:
          out.push_back(pagerank(p));
          break;
        case AlgorithmKind::LabelPropagation:
          out.push_back(label_propagation(p));
          break;
      }
    }
    return out;
  }

  void check_relation(const std::string& label, const std::string& type) const {
    if (!schema_.relationship_types.count(type)) {
      throw GenerationError("relationship type " + type + " is not in the schema");
    }
    if (!schema_.touches(type, label)) {
      const auto& ends = schema_.relationship_types.at(type);
      throw GenerationError("relationship type " + type + " connects " + ends.first + " to " + ends.second +
                            ", not " + label);
    }
  }

  Pipeline pipeline(const std::optional<std::string>& view, std::string label, std::string type,
                    Orientation o, std::optional<std::int64_t> iterations, std::optional<double> damping) const {
    const auto name = view.value_or(d_.view_name);
    return Pipeline{name, std::move(label), std::move(type), o, iterations, damping, views_.count(name) > 0};
  }

  const GraphSchema& schema_;
  const std::set<std::string>& views_;
  const GenerationDefaults& d_;

 private:
  QueryCandidate degree(const Pipeline& p) {
    return data_science({"MATCH (n:" + ident(p.label) + ")-[r:" + ident(p.type) +
                         "]-() WITH n, count(*) AS degree RETURN id(n), degree ORDER BY (degree) DESC"},
                        AlgorithmKind::DegreeCentrality,
                        "Ranks " + p.label + " nodes by their number of " + p.type +
                            " relationships (degree centrality).");
  }

  std::string stream_projection(const std::string& label) const {
    if (schema_.has_property(label, "DESCRIPTION")) return "gds.util.asNode(nodeId).DESCRIPTION AS name";
    return "nodeId AS name";
  }

  QueryCandidate pagerank(const Pipeline& p) {
    const auto iterations = p.iterations.value_or(d_.pagerank_iterations);
    const auto damping = p.damping.value_or(d_.damping_factor);
    std::vector<std::string> script;
    if (!p.view_exists) script.push_back(create_view(p.view, p.label, p.type, p.orientation));
    script.push_back(pagerank_estimate(p.view, iterations, damping));
    script.push_back("CALL gds.pageRank.stream(" + quoted(p.view) + ") YIELD nodeId, score RETURN " +
                     stream_projection(p.label) + ", score ORDER BY score DESC LIMIT " +
                     std::to_string(d_.pagerank_limit));
    return data_science(std::move(script), AlgorithmKind::PageRank,
                        std::string(p.view_exists ? "Reuses" : "Creates") + " the graph view '" + p.view +
                            "' over " + p.label + " and " + p.type + ", estimates PageRank memory (" +
                            std::to_string(iterations) + " iterations, damping " + format_double(damping, 2) +
                            ") and streams the top " + std::to_string(d_.pagerank_limit) + " nodes by score.");
  }

  QueryCandidate label_propagation(const Pipeline& p) {
    const auto iterations = p.iterations.value_or(d_.label_propagation_iterations);
    std::vector<std::string> script;
    if (!p.view_exists) script.push_back(create_view(p.view, p.label, p.type, p.orientation));
    script.push_back(label_propagation_estimate(p.view));
    script.push_back("CALL gds.labelPropagation.stream(" + quoted(p.view) + ", {maxIterations: " +
                     std::to_string(iterations) +
                     "}) YIELD nodeId, communityId RETURN communityId, count(nodeId) AS size ORDER BY size DESC "
                     "LIMIT " +
                     std::to_string(d_.community_limit));
    return data_science(std::move(script), AlgorithmKind::LabelPropagation,
                        std::string(p.view_exists ? "Reuses" : "Creates") + " the graph view '" + p.view +
                            "' over " + p.label + " and " + p.type + ", runs Label Propagation (" +
                            std::to_string(iterations) + " iterations) and lists the " +
                            std::to_string(d_.community_limit) + " largest communities.");
  }

  static QueryCandidate navigational(std::vector<std::string> script, std::string explanation) {
    QueryCandidate c;
    c.script = std::move(script);
    c.kind = CandidateKind::Navigational;
    c.explanation = std::move(explanation);
    return c;
  }

  static QueryCandidate data_science(std::vector<std::string> script, std::optional<AlgorithmKind> algorithm,
                                     std::string explanation) {
    QueryCandidate c;
    c.script = std::move(script);
    c.kind = CandidateKind::DataScience;
    c.algorithm = algorithm;
    c.explanation = std::move(explanation);
    return c;
  }
};

}  // namespace

std::optional<ViewRequirement> required_view(const QuestionAST& ast, const GenerationDefaults& defaults) {
  if (const auto* c = std::get_if<ast::Centrality>(&ast)) {
    return ViewRequirement{c->graph_name.value_or(defaults.view_name), c->node_label, c->rel_type,
                           Orientation::Natural};
  }
  if (const auto* m = std::get_if<ast::Community>(&ast)) {
    return ViewRequirement{m->view_name.value_or(defaults.view_name), m->node_label, m->rel_type,
                           Orientation::Undirected};
  }
  return std::nullopt;
}

std::vector<QueryCandidate> generate(const QuestionAST& ast, const GraphSchema& schema, const Lexicon& lexicon,
                                     const std::set<std::string>& existing_views,
                                     const GenerationDefaults& defaults) {
  Generator gen(schema, existing_views, defaults);
  std::vector<QueryCandidate> out;
  if (const auto* c = std::get_if<ast::Centrality>(&ast)) {
    gen.check_relation(c->node_label, c->rel_type);
    out = gen.run_algorithms(map_keyword_to_algorithms(c->keyword, lexicon),
                             gen.pipeline(c->graph_name, c->node_label, c->rel_type, Orientation::Natural,
                                          c->max_iterations, c->damping_factor));
  } else if (const auto* m = std::get_if<ast::Community>(&ast)) {
    gen.check_relation(m->node_label, m->rel_type);
    out = gen.run_algorithms(map_keyword_to_algorithms(m->keyword, lexicon),
                             gen.pipeline(m->view_name, m->node_label, m->rel_type, Orientation::Undirected,
                                          m->max_iterations, std::nullopt));
  } else {
    out = std::visit(
        [&](const auto& a) -> std::vector<QueryCandidate> {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, ast::Centrality> || std::is_same_v<T, ast::Community>) {
            return {};
          } else {
            return gen(a);
          }
        },
        ast);
  }

  const auto production = std::string(production_name(ast));
  for (auto& c : out) {
    c.id = candidate_id(c.script);
    c.score = kDefaultScore;
    c.production = production;
  }
  std::stable_sort(out.begin(), out.end(), [](const QueryCandidate& a, const QueryCandidate& b) {
    if (a.kind != b.kind) return a.kind == CandidateKind::Navigational;
    return a.rendered() < b.rendered();
  });
  return out;
}

}  // namespace nlds

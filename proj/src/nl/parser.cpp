#include "nlds/parser.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <initializer_list>
#include <set>

namespace nlds {

namespace {

// Partially filled production. Each production reads the fields it needs.
struct Slots {
  std::string label;         // primary node label
  std::string target_label;  // second label (selection+projection, relation via label)
  std::string property;      // projected property
  std::string current;       // property of the condition being parsed
  std::vector<Condition> conditions;
  std::optional<std::string> rel;
  std::optional<std::string> base;
  std::optional<std::string> view;
  std::optional<std::int64_t> iterations;
  std::optional<double> damping;
  bool oriented = false;
  std::string keyword;
  std::optional<AlgorithmKind> algorithm;
};

struct Ctx {
  std::span<const Token> toks;
  const Lexicon* lex;
  std::size_t furthest = 0;

  void reached(std::size_t pos) { furthest = std::max(furthest, pos); }
};

using Next = std::function<void(const Slots&, std::size_t)>;
using Rule = std::function<void(Ctx&, const Slots&, std::size_t, const Next&)>;

// ---------------------------------------------------------------------------
// Combinators. Every rule calls `next` once per way it can match, which makes
// the whole grammar enumerate all parses by backtracking.

void run_seq(const std::vector<Rule>& rules, std::size_t i, Ctx& c, const Slots& s, std::size_t p,
             const Next& k) {
  if (i == rules.size()) {
    k(s, p);
    return;
  }
  rules[i](c, s, p, [&](const Slots& s2, std::size_t p2) { run_seq(rules, i + 1, c, s2, p2, k); });
}

Rule seq(std::vector<Rule> rules) {
  return [rules = std::move(rules)](Ctx& c, const Slots& s, std::size_t p, const Next& k) {
    run_seq(rules, 0, c, s, p, k);
  };
}

Rule alt(std::vector<Rule> rules) {
  return [rules = std::move(rules)](Ctx& c, const Slots& s, std::size_t p, const Next& k) {
    for (const auto& r : rules) r(c, s, p, k);
  };
}

Rule empty() {
  return [](Ctx&, const Slots& s, std::size_t p, const Next& k) { k(s, p); };
}

Rule opt(Rule r) { return alt({std::move(r), empty()}); }

void run_many(const Rule& r, Ctx& c, const Slots& s, std::size_t p, const Next& k) {
  k(s, p);
  r(c, s, p, [&](const Slots& s2, std::size_t p2) {
    if (p2 > p) run_many(r, c, s2, p2, k);
  });
}

Rule many(Rule r) {
  return [r = std::move(r)](Ctx& c, const Slots& s, std::size_t p, const Next& k) {
    run_many(r, c, s, p, k);
  };
}

/// Single-token rule: `f` returns the slot states the token leads to.
using TokenFn = std::function<std::vector<Slots>(const Ctx&, const Token&, const Slots&)>;

Rule token(TokenFn f) {
  return [f = std::move(f)](Ctx& c, const Slots& s, std::size_t p, const Next& k) {
    if (p >= c.toks.size()) return;
    for (const auto& s2 : f(c, c.toks[p], s)) {
      c.reached(p + 1);
      k(s2, p + 1);
    }
  };
}

Rule kw(std::initializer_list<std::string_view> phrases) {
  std::vector<std::string> list(phrases.begin(), phrases.end());
  return token([list](const Ctx&, const Token& t, const Slots& s) -> std::vector<Slots> {
    if (t.kind != TokenKind::Keyword) return {};
    const auto n = normalize_phrase(t.surface);
    if (std::find(list.begin(), list.end(), n) == list.end()) return {};
    return {s};
  });
}

using Setter = std::function<bool(Slots&, const std::string&)>;

Rule ref(TokenKind kind, Setter set) {
  return token([kind, set = std::move(set)](const Ctx&, const Token& t,
                                            const Slots& s) -> std::vector<Slots> {
    if (t.kind != kind || !t.resolved) return {};
    Slots s2 = s;
    if (!set(s2, *t.resolved)) return {};
    return {s2};
  });
}

Rule label(Setter set) { return ref(TokenKind::LabelRef, std::move(set)); }
Rule prop(Setter set) { return ref(TokenKind::PropRef, std::move(set)); }
Rule rel(Setter set) { return ref(TokenKind::RelRef, std::move(set)); }

/// Names of views and graphs: a bare word or a literal.
Rule name(Setter set) {
  return token([set = std::move(set)](const Ctx&, const Token& t,
                                      const Slots& s) -> std::vector<Slots> {
    if (t.kind != TokenKind::Word && t.kind != TokenKind::ValueLiteral) return {};
    Slots s2 = s;
    if (!set(s2, t.surface)) return {};
    return {s2};
  });
}

Rule any_word() {
  return token([](const Ctx&, const Token& t, const Slots& s) -> std::vector<Slots> {
    if (t.kind != TokenKind::Word) return {};
    return {s};
  });
}

Rule integer(std::function<void(Slots&, std::int64_t)> set) {
  return token([set = std::move(set)](const Ctx&, const Token& t,
                                      const Slots& s) -> std::vector<Slots> {
    if (t.kind != TokenKind::NumberLiteral) return {};
    std::int64_t v = 0;
    const auto* end = t.surface.data() + t.surface.size();
    auto [ptr, ec] = std::from_chars(t.surface.data(), end, v);
    if (ec != std::errc{} || ptr != end) return {};
    Slots s2 = s;
    set(s2, v);
    return {s2};
  });
}

Rule decimal(std::function<void(Slots&, double)> set) {
  return token([set = std::move(set)](const Ctx&, const Token& t,
                                      const Slots& s) -> std::vector<Slots> {
    if (t.kind != TokenKind::FloatLiteral && t.kind != TokenKind::NumberLiteral) return {};
    double v = 0;
    const auto* end = t.surface.data() + t.surface.size();
    auto [ptr, ec] = std::from_chars(t.surface.data(), end, v);
    if (ec != std::errc{} || ptr != end) return {};
    Slots s2 = s;
    set(s2, v);
    return {s2};
  });
}

Rule flag(std::function<void(Slots&)> set, std::initializer_list<std::string_view> phrases) {
  auto match = kw(phrases);
  return [match, set = std::move(set)](Ctx& c, const Slots& s, std::size_t p, const Next& k) {
    match(c, s, p, [&](const Slots& s2, std::size_t p2) {
      Slots s3 = s2;
      set(s3);
      k(s3, p2);
    });
  };
}

/// Algorithm keyword phrase from the keyword table; `community` selects the
/// clustering family, otherwise the centrality family.
Rule algorithm_keyword(bool community) {
  return token([community](const Ctx& c, const Token& t, const Slots& s) -> std::vector<Slots> {
    if (t.kind != TokenKind::Keyword) return {};
    const auto phrase = normalize_phrase(t.surface);
    const auto& table = c.lex->keyword_table();
    auto it = table.find(phrase);
    if (it == table.end()) return {};
    const bool clustering = it->second.count(AlgorithmKind::LabelPropagation) > 0;
    if (clustering != community) return {};
    Slots s2 = s;
    s2.keyword = phrase;
    return {s2};
  });
}

Rule algorithm_name() {
  return token([](const Ctx& c, const Token& t, const Slots& s) -> std::vector<Slots> {
    if (t.kind != TokenKind::Keyword) return {};
    auto kind = c.lex->algorithm_name(t.surface);
    if (!kind) return {};
    Slots s2 = s;
    s2.algorithm = kind;
    return {s2};
  });
}

/// A label reached through an unnamed relationship: one branch per schema
/// relationship type connecting it with the primary label.
Rule related_label() {
  return token([](const Ctx& c, const Token& t, const Slots& s) -> std::vector<Slots> {
    if (t.kind != TokenKind::LabelRef || !t.resolved || s.rel) return {};
    std::vector<Slots> out;
    for (const auto& type : c.lex->schema().types_connecting(s.label, *t.resolved)) {
      Slots s2 = s;
      s2.rel = type;
      out.push_back(std::move(s2));
    }
    return out;
  });
}

bool value_token(const Token& t) {
  return t.kind == TokenKind::ValueLiteral || t.kind == TokenKind::Word ||
         t.kind == TokenKind::NumberLiteral || t.kind == TokenKind::FloatLiteral;
}

std::string join_surfaces(std::span<const Token> toks) {
  std::string out;
  for (const auto& t : toks) {
    if (!out.empty()) out += ' ';
    out += t.surface;
  }
  return out;
}

/// Condition value for `Slots::current`. Word runs matching a synonym resolve
/// to the canonical value; otherwise a single token is taken verbatim.
Rule condition_value() {
  return [](Ctx& c, const Slots& s, std::size_t p, const Next& k) {
    std::size_t run = 0;
    while (p + run < c.toks.size() && value_token(c.toks[p + run])) ++run;
    bool synonym_hit = false;
    for (std::size_t n = run; n >= 1; --n) {
      const auto phrase = join_surfaces(c.toks.subspan(p, n));
      if (auto canonical = c.lex->synonym(s.current, phrase)) {
        synonym_hit = true;
        Slots s2 = s;
        s2.conditions.emplace_back(s.current, *canonical);
        c.reached(p + n);
        k(s2, p + n);
      }
    }
    if (!synonym_hit && run >= 1) {
      Slots s2 = s;
      s2.conditions.emplace_back(s.current, c.toks[p].surface);
      c.reached(p + 1);
      k(s2, p + 1);
    }
  };
}

/// Adjective such as "caucasian": resolved through value synonyms to a
/// (property, value) pair on the primary label, one branch per owner.
Rule adjective() {
  return [](Ctx& c, const Slots& s, std::size_t p, const Next& k) {
    std::size_t run = 0;
    while (p + run < c.toks.size() && (c.toks[p + run].kind == TokenKind::Word ||
                                       c.toks[p + run].kind == TokenKind::ValueLiteral)) {
      ++run;
    }
    for (std::size_t n = run; n >= 1; --n) {
      const auto phrase = join_surfaces(c.toks.subspan(p, n));
      for (const auto& [property, canonical] : c.lex->synonym_owners(phrase)) {
        if (!c.lex->schema().has_property(s.label, property)) continue;
        Slots s2 = s;
        s2.conditions.emplace_back(property, canonical);
        c.reached(p + n);
        k(s2, p + n);
      }
    }
  };
}

// Common setters.
bool set_label(Slots& s, const std::string& v) {
  s.label = v;
  return true;
}
bool set_target(Slots& s, const std::string& v) {
  if (!s.target_label.empty() && s.target_label != v) return false;
  s.target_label = v;
  return true;
}
bool set_property(Slots& s, const std::string& v) {
  s.property = v;
  return true;
}
bool set_current(Slots& s, const std::string& v) {
  s.current = v;
  return true;
}
bool set_rel(Slots& s, const std::string& v) {
  if (s.rel) return false;
  s.rel = v;
  return true;
}
bool set_view(Slots& s, const std::string& v) {
  if (s.view) return false;
  s.view = v;
  return true;
}
bool set_base(Slots& s, const std::string& v) {
  s.base = v;
  return true;
}
bool ignore(Slots&, const std::string&) { return true; }

// ---------------------------------------------------------------------------
// The grammar. Mirrors grammar.ebnf at the repository root.

struct Production {
  std::string name;
  Rule rule;
  std::function<std::optional<QuestionAST>(const Slots&, const GraphSchema&)> build;
};

bool conditions_valid(const std::vector<Condition>& conds, const std::string& label,
                      const GraphSchema& schema) {
  return std::all_of(conds.begin(), conds.end(),
                     [&](const Condition& c) { return schema.has_property(label, c.first); });
}

const std::vector<Production>& grammar() {
  static const std::vector<Production> productions = [] {
    const Rule the = opt(kw({"the"}));
    const Rule find = kw({"find", "get", "show", "list", "display"});
    const Rule which_is = seq({kw({"which", "what"}), kw({"is", "are"})});
    const Rule for_which = alt({seq({kw({"for"}), kw({"which"})}), kw({"where", "whose"})});
    const Rule study = opt(alt({kw({"in the study", "in the graph"}),
                                seq({kw({"in"}), the, opt(kw({"synthea"})), kw({"study"})})}));

    // [the] P [of [the] (P | L)] [is] value
    const Rule condition =
        seq({the, prop(set_current), opt(seq({kw({"of"}), the, alt({prop(ignore), label(ignore)})})),
             opt(kw({"is"})), condition_value()});
    const Rule conditions = seq({condition, many(seq({kw({"and"}), condition}))});

    // [the] P [of [the] L2] [is] value
    const Rule target_condition =
        seq({the, prop(set_current), opt(seq({kw({"of"}), the, label(set_target)})), opt(kw({"is"})),
             condition_value()});

    const Rule graph_clause =
        seq({alt({kw({"in the graph"}), seq({kw({"within"}), the, kw({"graph"})})}),
             opt(name(set_view))});
    const Rule view_clause =
        alt({seq({kw({"within", "in", "on"}), the, kw({"view"}), name(set_view)}), graph_clause});
    const Rule iterations = alt({
        // with a maximum of 25 iterations
        seq({opt(kw({"and"})), kw({"with"}), opt(kw({"a", "an"})), kw({"maximum", "max"}), opt(kw({"of"})),
             integer([](Slots& s, std::int64_t v) { s.iterations = v; }), kw({"iterations", "iteration"})}),
        // with 25 maximum of iterations
        seq({opt(kw({"and"})), kw({"with"}), integer([](Slots& s, std::int64_t v) { s.iterations = v; }),
             opt(kw({"maximum", "max"})), opt(kw({"of"})), kw({"iterations", "iteration"})}),
        // with max iterations 20
        seq({opt(kw({"and"})), kw({"with"}), kw({"maximum", "max"}), kw({"iterations", "iteration"}),
             integer([](Slots& s, std::int64_t v) { s.iterations = v; })}),
    });
    const Rule damping =
        seq({opt(kw({"and"})), opt(kw({"with"})), opt(kw({"a"})), kw({"damping factor"}), opt(kw({"of"})),
             decimal([](Slots& s, double v) { s.damping = v; })});
    const Rule relation_word = opt(kw({"relation", "relationship"}));

    std::vector<Production> g;

    g.push_back({"Selection",
                 seq({find, opt(kw({"all"})), the, label(set_label),
                      alt({for_which, kw({"with"})}), conditions, study}),
                 [](const Slots& s, const GraphSchema& schema) -> std::optional<QuestionAST> {
                   if (s.conditions.empty() || !conditions_valid(s.conditions, s.label, schema)) {
                     return std::nullopt;
                   }
                   return ast::Selection{s.label, s.conditions};
                 }});

    g.push_back({"Projection",
                 alt({seq({which_is, the, prop(set_property), kw({"of"}), opt(kw({"all"})), the,
                           label(set_label), study}),
                      seq({find, the, prop(set_property), kw({"of"}), opt(kw({"all"})), the,
                           label(set_label), study})}),
                 [](const Slots& s, const GraphSchema& schema) -> std::optional<QuestionAST> {
                   if (!schema.has_property(s.label, s.property)) return std::nullopt;
                   return ast::Projection{s.label, s.property};
                 }});

    g.push_back({"SelectionProjection",
                 seq({alt({find, which_is}), the, label(set_label), prop(set_property),
                      opt(kw({"node", "nodes"})), for_which, target_condition,
                      many(seq({kw({"and"}), target_condition})), study}),
                 [](const Slots& s, const GraphSchema& schema) -> std::optional<QuestionAST> {
                   if (s.target_label.empty() || !schema.has_property(s.label, s.property) ||
                       !conditions_valid(s.conditions, s.target_label, schema)) {
                     return std::nullopt;
                   }
                   return ast::SelectionProjection{s.label, s.property, s.target_label, s.conditions};
                 }});

    g.push_back(
        {"Aggregation",
         seq({kw({"how many"}), label(set_label),
              alt({seq({kw({"are"}), kw({"there"})}),
                   seq({kw({"are", "is"}), adjective(), many(seq({kw({"and"}), adjective()}))}),
                   seq({alt({for_which, kw({"with"}), seq({kw({"that", "who"}), kw({"have", "has"})})}),
                        conditions}),
                   empty()}),
              study}),
         [](const Slots& s, const GraphSchema& schema) -> std::optional<QuestionAST> {
           if (!conditions_valid(s.conditions, s.label, schema)) return std::nullopt;
           return ast::Aggregation{s.label, s.conditions};
         }});

    g.push_back({"ViewCreation",
                 seq({kw({"create"}), opt(seq({kw({"and"}), kw({"estimate"}), kw({"memory"})})),
                      kw({"for"}), the, kw({"graph"}), kw({"view"}), opt(name(set_base)),
                      opt(seq({kw({"named as"}), name(set_view)})), kw({"with"}), the, kw({"node"}),
                      label(set_label), kw({"and"}), the, kw({"relationship", "relation"}), rel(set_rel),
                      opt(flag([](Slots& s) { s.oriented = true; }, {"oriented"}))}),
                 [](const Slots& s, const GraphSchema&) -> std::optional<QuestionAST> {
                   return ast::ViewCreation{s.base, s.view, s.label, *s.rel, s.oriented};
                 }});

    g.push_back({"EstimateMemory",
                 seq({kw({"estimate"}), the, opt(kw({"required"})), kw({"memory"}), kw({"for"}),
                      kw({"applying", "apply"}), algorithm_name(), kw({"on"}), the, kw({"graph"}),
                      opt(kw({"view"})), name(set_view)}),
                 [](const Slots& s, const GraphSchema&) -> std::optional<QuestionAST> {
                   if (s.algorithm == AlgorithmKind::DegreeCentrality) return std::nullopt;
                   return ast::EstimateMemory{*s.algorithm, *s.view};
                 }});

    const Rule centrality_relation =
        seq({opt(any_word()), kw({"with", "for", "of", "by", "to", "in"}), the,
             alt({seq({relation_word, rel(set_rel)}), related_label()})});
    g.push_back({"Centrality",
                 seq({alt({find, which_is}), the, algorithm_keyword(false), label(set_label),
                      centrality_relation, opt(graph_clause), opt(iterations), opt(damping),
                      opt(graph_clause), study}),
                 [](const Slots& s, const GraphSchema&) -> std::optional<QuestionAST> {
                   if (s.iterations && *s.iterations < 1) return std::nullopt;
                   if (s.damping && (*s.damping <= 0.0 || *s.damping >= 1.0)) return std::nullopt;
                   return ast::Centrality{s.keyword, s.label, *s.rel, s.view, s.iterations, s.damping};
                 }});

    const Rule community_relation = alt({
        seq({kw({"with", "by"}), the, relation_word, rel(set_rel)}),
        seq({kw({"who", "that"}), kw({"have", "has"}), the, rel(set_rel)}),
        seq({kw({"having"}), the, rel(set_rel)}),
        seq({kw({"with", "by", "for"}), the, related_label()}),
        seq({kw({"who", "that"}), kw({"have", "has"}), the, related_label()}),
    });
    g.push_back({"Community",
                 seq({alt({seq({algorithm_keyword(true), the, label(set_label)}),
                           seq({find, the, algorithm_keyword(true), kw({"of"}), opt(kw({"all"})), the,
                                label(set_label)})}),
                      opt(view_clause), community_relation, opt(view_clause), opt(iterations),
                      opt(view_clause), study}),
                 [](const Slots& s, const GraphSchema&) -> std::optional<QuestionAST> {
                   if (s.iterations && *s.iterations < 1) return std::nullopt;
                   return ast::Community{s.keyword, s.label, s.view, *s.rel, s.iterations};
                 }});
    return g;
  }();
  return productions;
}

}  // namespace

std::vector<QuestionAST> parse(std::span<const Token> tokens, const Lexicon& lexicon) {
  struct Hit {
    std::size_t production;
    std::string key;
    QuestionAST ast;
  };
  std::vector<Hit> hits;
  std::vector<std::size_t> reach;

  const auto& g = grammar();
  for (std::size_t i = 0; i < g.size(); ++i) {
    Ctx ctx{tokens, &lexicon};
    g[i].rule(ctx, Slots{}, 0, [&](const Slots& s, std::size_t p) {
      if (p != tokens.size()) return;
      if (auto ast = g[i].build(s, lexicon.schema())) {
        hits.push_back({i, describe(*ast), std::move(*ast)});
      }
    });
    reach.push_back(ctx.furthest);
  }

  if (hits.empty()) {
    const auto best = *std::max_element(reach.begin(), reach.end());
    std::vector<std::string> furthest;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (reach[i] == best) furthest.push_back(g[i].name);
    }
    Span matched{0, 0};
    if (best > 0) matched = {tokens.front().span.start, tokens[best - 1].span.end};
    std::string message = "no grammar production matches the question";
    if (best < tokens.size()) {
      message += "; stopped at '" + tokens[best].surface + "'";
    } else if (!tokens.empty()) {
      message += "; the question ended early";
    }
    throw ParseError(message, matched, std::move(furthest));
  }

  std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.production != b.production) return a.production < b.production;
    return a.key < b.key;
  });
  std::vector<QuestionAST> out;
  for (auto& h : hits) {
    if (std::find(out.begin(), out.end(), h.ast) == out.end()) out.push_back(std::move(h.ast));
  }
  return out;
}

std::vector<QuestionAST> parse_question(std::string_view text, const Lexicon& lexicon) {
  const auto tokens = tokenize(text, lexicon);
  return parse(tokens, lexicon);
}

}  // namespace nlds

#include "nlds/cypher.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>

namespace nlds::cypher {

const Argument* Argument::get(std::string_view key) const {
  for (const auto& e : map) {
    if (e.key == key) return &e.value;
  }
  return nullptr;
}

bool Argument::operator==(const Argument& other) const {
  return is_map == other.is_map && scalar == other.scalar && map == other.map;
}

const std::vector<std::string>* procedure_columns(std::string_view name) {
  static const std::vector<std::string> estimate = {"nodeCount", "relationshipCount", "bytesMin", "bytesMax",
                                                    "requiredMemory"};
  static const std::map<std::string, std::vector<std::string>, std::less<>> table = {
      {"gds.graph.create", {"graphName", "nodeCount", "relationshipCount"}},
      {"gds.graph.create.estimate", estimate},
      {"gds.pageRank.write.estimate", estimate},
      {"gds.pageRank.stream", {"nodeId", "score"}},
      {"gds.labelPropagation.write.estimate", estimate},
      {"gds.labelPropagation.stream", {"nodeId", "communityId"}},
  };
  auto it = table.find(name);
  return it == table.end() ? nullptr : &it->second;
}

namespace {

// Accepted argument shapes: number of leading string arguments, then whether a
// map must / may follow.
struct Signature {
  std::size_t strings;
  bool map_required;
  bool map_optional;
};

const std::map<std::string, Signature, std::less<>>& signatures() {
  static const std::map<std::string, Signature, std::less<>> table = {
      {"gds.graph.create", {2, true, false}},
      {"gds.graph.create.estimate", {1, true, false}},
      {"gds.pageRank.write.estimate", {1, true, false}},
      {"gds.pageRank.stream", {1, false, true}},
      {"gds.labelPropagation.write.estimate", {1, true, false}},
      {"gds.labelPropagation.stream", {1, false, true}},
  };
  return table;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Ident, String, Integer, Float, Symbol, End };

struct Lexeme {
  Tok kind;
  std::string text;  // identifier name, unescaped string, number text or symbol
  Span span;
  bool quoted_ident = false;
};

std::vector<Lexeme> lex(std::string_view src) {
  std::vector<Lexeme> out;
  std::size_t i = 0;
  auto ident_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    const std::size_t start = i;
    if (ident_start(c)) {
      while (i < src.size() && ident_char(src[i])) ++i;
      out.push_back({Tok::Ident, std::string(src.substr(start, i - start)), {start, i}});
      continue;
    }
    if (c == '`') {
      const auto close = src.find('`', i + 1);
      if (close == std::string_view::npos) throw CypherSubsetError("unterminated identifier", {start, src.size()});
      out.push_back({Tok::Ident, std::string(src.substr(i + 1, close - i - 1)), {start, close + 1}, true});
      i = close + 1;
      continue;
    }
    // ’ (U+2019) is accepted as a closing quote; typeset listings use it.
    if (c == '\'' || c == '"') {
      std::string text;
      ++i;
      bool closed = false;
      while (i < src.size()) {
        if (src[i] == '\\' && i + 1 < src.size()) {
          text += src[i + 1];
          i += 2;
          continue;
        }
        if (src[i] == c) {
          ++i;
          closed = true;
          break;
        }
        if (c == '\'' && src.substr(i, 3) == "\xE2\x80\x99") {
          i += 3;
          closed = true;
          break;
        }
        text += src[i++];
      }
      if (!closed) throw CypherSubsetError("unterminated string", {start, src.size()});
      out.push_back({Tok::String, std::move(text), {start, i}});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      Tok kind = Tok::Integer;
      if (i + 1 < src.size() && src[i] == '.' && std::isdigit(static_cast<unsigned char>(src[i + 1]))) {
        ++i;
        while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        kind = Tok::Float;
      }
      out.push_back({kind, std::string(src.substr(start, i - start)), {start, i}});
      continue;
    }
    if (std::string_view("()[]{}:,.-<>*;").find(c) != std::string_view::npos) {
      out.push_back({Tok::Symbol, std::string(1, c), {start, start + 1}});
      ++i;
      continue;
    }
    throw CypherSubsetError(std::string("unexpected character '") + c + "'", {start, start + 1});
  }
  out.push_back({Tok::End, "", {src.size(), src.size()}});
  return out;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  bool at_end() const { return peek().kind == Tok::End; }

  void skip_semicolons() {
    while (symbol(";")) {
    }
  }

  QueryPlan statement() {
    bound_.clear();
    QueryPlan plan;
    if (keyword("MATCH")) {
      match(plan);
    } else if (keyword("CALL")) {
      call(plan);
    } else {
      fail("expected MATCH or CALL");
    }
    return plan;
  }

 private:
  const Lexeme& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }

  [[noreturn]] void fail(const std::string& what) const {
    const auto& t = peek();
    throw CypherSubsetError(what + (t.kind == Tok::End ? " but reached the end" : " near '" + t.text + "'"),
                            t.span);
  }

  bool is_keyword(const Lexeme& t, std::string_view kw) const {
    return t.kind == Tok::Ident && !t.quoted_ident && upper(t.text) == kw;
  }

  bool keyword(std::string_view kw) {
    if (!is_keyword(peek(), kw)) return false;
    ++pos_;
    return true;
  }

  void expect_keyword(std::string_view kw) {
    if (!keyword(kw)) fail("expected " + std::string(kw));
  }

  bool symbol(std::string_view s) {
    if (peek().kind != Tok::Symbol || peek().text != s) return false;
    ++pos_;
    return true;
  }

  void expect_symbol(std::string_view s) {
    if (!symbol(s)) fail("expected '" + std::string(s) + "'");
  }

  static bool reserved(const std::string& word) {
    static const std::set<std::string> words = {"MATCH", "WITH", "RETURN", "ORDER", "BY", "LIMIT", "CALL",
                                                "YIELD", "AS", "DESC", "ASC", "DESCENDING", "ASCENDING"};
    return words.count(upper(word)) > 0;
  }

  std::string identifier(const char* what) {
    const auto& t = peek();
    if (t.kind != Tok::Ident || (!t.quoted_ident && reserved(t.text))) fail(std::string("expected ") + what);
    ++pos_;
    return t.text;
  }

  Value scalar_literal() {
    const bool negative = symbol("-");
    const auto& t = peek();
    if (t.kind == Tok::String && !negative) {
      ++pos_;
      return t.text;
    }
    if (t.kind == Tok::Integer) {
      ++pos_;
      std::int64_t v = 0;
      std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      return negative ? -v : v;
    }
    if (t.kind == Tok::Float) {
      ++pos_;
      double v = 0;
      std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      return negative ? -v : v;
    }
    fail("expected a literal");
  }

  Argument argument() {
    Argument a;
    if (peek().kind == Tok::Symbol && peek().text == "{") {
      a.is_map = true;
      a.map = map_literal();
    } else {
      a.scalar = scalar_literal();
    }
    return a;
  }

  std::vector<MapEntry> map_literal() {
    expect_symbol("{");
    std::vector<MapEntry> entries;
    if (!symbol("}")) {
      do {
        MapEntry e;
        e.key = identifier("a map key");
        expect_symbol(":");
        e.value = argument();
        entries.push_back(std::move(e));
      } while (symbol(","));
      expect_symbol("}");
    }
    return entries;
  }

  NodePattern node_pattern() {
    expect_symbol("(");
    NodePattern n;
    if (peek().kind == Tok::Ident) n.var = identifier("a variable");
    if (symbol(":")) n.label = identifier("a label");
    if (peek().kind == Tok::Symbol && peek().text == "{") {
      const auto start = peek().span;
      for (auto& e : map_literal()) {
        if (e.value.is_map) throw CypherSubsetError("nested maps are not allowed in patterns", start);
        n.properties.emplace_back(std::move(e.key), std::move(e.value.scalar));
      }
    }
    expect_symbol(")");
    if (!n.var.empty()) bound_.insert(n.var);
    return n;
  }

  RelPattern rel_pattern() {
    RelPattern r;
    const bool incoming = symbol("<");
    expect_symbol("-");
    expect_symbol("[");
    if (peek().kind == Tok::Ident) r.var = identifier("a variable");
    if (symbol(":")) r.type = identifier("a relationship type");
    if (symbol("*")) r.variable_length = true;
    expect_symbol("]");
    expect_symbol("-");
    const bool outgoing = symbol(">");
    if (incoming && outgoing) fail("a relationship cannot point both ways");
    r.direction = incoming ? Direction::Incoming : (outgoing ? Direction::Outgoing : Direction::Both);
    if (r.variable_length && !r.var.empty()) fail("variable-length relationships cannot be bound");
    if (!r.var.empty()) bound_.insert(r.var);
    return r;
  }

  void match(QueryPlan& plan) {
    std::vector<NodePattern> nodes{node_pattern()};
    std::vector<RelPattern> rels;
    while (peek().kind == Tok::Symbol && (peek().text == "-" || peek().text == "<")) {
      rels.push_back(rel_pattern());
      nodes.push_back(node_pattern());
    }
    if (rels.empty()) {
      plan.steps.emplace_back(NodeScan{std::move(nodes.front())});
    } else {
      plan.steps.emplace_back(PathMatch{std::move(nodes), std::move(rels)});
    }
    if (keyword("WITH")) projection(plan, true);
    expect_keyword("RETURN");
    projection(plan, false);
    order_limit(plan);
  }

  void call(QueryPlan& plan) {
    const auto start = peek().span;
    std::string name = identifier("a procedure name");
    while (symbol(".")) name += "." + identifier("a procedure name");
    auto sig = std::find_if(signatures().begin(), signatures().end(),
                            [&](const auto& kv) { return lower(kv.first) == lower(name); });
    if (sig == signatures().end()) throw CypherSubsetError("unsupported procedure " + name, {start.start, peek().span.start});
    ProcedureCall proc;
    proc.name = sig->first;
    expect_symbol("(");
    if (!symbol(")")) {
      do {
        proc.args.push_back(argument());
      } while (symbol(","));
      expect_symbol(")");
    }
    const Signature& s = sig->second;
    const std::size_t min_args = s.strings + (s.map_required ? 1 : 0);
    const std::size_t max_args = s.strings + ((s.map_required || s.map_optional) ? 1 : 0);
    bool ok = proc.args.size() >= min_args && proc.args.size() <= max_args;
    for (std::size_t i = 0; ok && i < proc.args.size(); ++i) {
      ok = i < s.strings ? (!proc.args[i].is_map && std::holds_alternative<std::string>(proc.args[i].scalar))
                         : proc.args[i].is_map;
    }
    if (!ok) throw CypherSubsetError("wrong arguments for " + proc.name, {start.start, peek().span.start});

    const auto& columns = *procedure_columns(proc.name);
    if (keyword("YIELD")) {
      proc.explicit_yield = true;
      do {
        const auto& t = peek();
        auto col = identifier("a yield column");
        if (std::find(columns.begin(), columns.end(), col) == columns.end()) {
          throw CypherSubsetError(proc.name + " does not yield " + col, t.span);
        }
        proc.yields.push_back(col);
      } while (symbol(","));
    } else {
      proc.yields = columns;
    }
    bound_.insert(proc.yields.begin(), proc.yields.end());
    plan.steps.emplace_back(std::move(proc));
    if (keyword("RETURN")) {
      projection(plan, false);
      order_limit(plan);
    }
  }

  Expr expression() {
    if (symbol("(")) {
      Expr e = expression();
      expect_symbol(")");
      e.parenthesized = true;
      return e;
    }
    const auto& t = peek();
    if (t.kind == Tok::String || t.kind == Tok::Integer || t.kind == Tok::Float ||
        (t.kind == Tok::Symbol && t.text == "-")) {
      Expr e;
      e.kind = Expr::Kind::Literal;
      e.literal = scalar_literal();
      return e;
    }
    if (t.kind != Tok::Ident) fail("expected an expression");
    const auto& next = peek(1);
    const bool call = next.kind == Tok::Symbol && next.text == "(";
    if (!t.quoted_ident && call && lower(t.text) == "count") {
      pos_ += 2;
      Expr e;
      if (symbol("*")) {
        e.kind = Expr::Kind::CountStar;
      } else {
        e.kind = Expr::Kind::Count;
        e.var = bound_variable();
      }
      expect_symbol(")");
      return e;
    }
    if (!t.quoted_ident && call && lower(t.text) == "id") {
      pos_ += 2;
      Expr e;
      e.kind = Expr::Kind::Id;
      e.var = bound_variable();
      expect_symbol(")");
      return e;
    }
    if (!t.quoted_ident && t.text == "gds" && peek(1).text == "." && peek(2).text == "util") {
      pos_ += 1;
      expect_symbol(".");
      identifier("util");
      expect_symbol(".");
      if (identifier("asNode") != "asNode") fail("only gds.util.asNode is supported");
      expect_symbol("(");
      Expr e;
      e.kind = Expr::Kind::AsNodeProperty;
      e.var = bound_variable();
      expect_symbol(")");
      expect_symbol(".");
      e.key = identifier("a property key");
      return e;
    }
    Expr e;
    e.var = bound_variable();
    if (symbol(".")) {
      e.kind = Expr::Kind::Property;
      e.key = identifier("a property key");
    }
    return e;
  }

  std::string bound_variable() {
    const auto& t = peek();
    auto name = identifier("a variable");
    if (!bound_.count(name)) throw CypherSubsetError("variable '" + name + "' is not defined", t.span);
    return name;
  }

  void projection(QueryPlan& plan, bool is_with) {
    std::vector<ProjectItem> items;
    do {
      ProjectItem item{expression(), std::nullopt};
      if (keyword("AS")) item.alias = identifier("an alias");
      if (is_with && !item.alias && item.expr.kind != Expr::Kind::Variable) {
        fail("expressions in WITH must be aliased");
      }
      items.push_back(std::move(item));
    } while (symbol(","));

    const bool aggregate = std::any_of(items.begin(), items.end(),
                                       [](const ProjectItem& i) { return i.expr.is_aggregate(); });
    std::set<std::string> outputs;
    for (const auto& i : items) outputs.insert(i.column());
    if (is_with || aggregate) {
      bound_ = outputs;
    } else {
      bound_.insert(outputs.begin(), outputs.end());
    }
    if (aggregate) {
      plan.steps.emplace_back(Aggregate{std::move(items), is_with});
    } else {
      plan.steps.emplace_back(Project{std::move(items), is_with});
    }
  }

  void order_limit(QueryPlan& plan) {
    OrderLimit ol;
    bool any = false;
    if (keyword("ORDER")) {
      expect_keyword("BY");
      ol.key = expression();
      if (keyword("DESC") || keyword("DESCENDING")) {
        ol.descending = true;
      } else if (!keyword("ASC")) {
        keyword("ASCENDING");
      }
      any = true;
    }
    if (keyword("LIMIT")) {
      const auto& t = peek();
      if (t.kind != Tok::Integer) fail("expected an integer LIMIT");
      ++pos_;
      std::int64_t v = 0;
      std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      ol.limit = v;
      any = true;
    }
    if (any) plan.steps.emplace_back(std::move(ol));
  }

  std::vector<Lexeme> toks_;
  std::size_t pos_ = 0;
  std::set<std::string> bound_;
};

// ---------------------------------------------------------------------------
// Rendering

bool plain(const std::string& s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string ident(const std::string& s) { return plain(s) ? s : "`" + s + "`"; }

std::string render_argument(const Argument& a);

std::string render_map(const std::vector<MapEntry>& map) {
  std::string out = "{";
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (i) out += ", ";
    out += ident(map[i].key) + ": " + render_argument(map[i].value);
  }
  return out + "}";
}

std::string render_argument(const Argument& a) {
  return a.is_map ? render_map(a.map) : to_cypher_literal(a.scalar);
}

std::string render_node(const NodePattern& n) {
  std::string out = "(" + (n.var.empty() ? "" : ident(n.var));
  if (!n.label.empty()) out += ":" + ident(n.label);
  if (!n.properties.empty()) {
    out += " {";
    for (std::size_t i = 0; i < n.properties.size(); ++i) {
      if (i) out += ", ";
      out += ident(n.properties[i].first) + ": " + to_cypher_literal(n.properties[i].second);
    }
    out += "}";
  }
  return out + ")";
}

std::string render_rel(const RelPattern& r) {
  std::string inner = r.var.empty() ? "" : ident(r.var);
  if (!r.type.empty()) inner += ":" + ident(r.type);
  if (r.variable_length) inner += "*";
  const std::string left = r.direction == Direction::Incoming ? "<-" : "-";
  const std::string right = r.direction == Direction::Outgoing ? "->" : "-";
  return left + "[" + inner + "]" + right;
}

std::string render_items(const std::vector<ProjectItem>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += render(items[i].expr);
    if (items[i].alias) out += " AS " + ident(*items[i].alias);
  }
  return out;
}

}  // namespace

std::string render(const Expr& e) {
  std::string out;
  switch (e.kind) {
    case Expr::Kind::Variable:
      out = ident(e.var);
      break;
    case Expr::Kind::Property:
      out = ident(e.var) + "." + ident(e.key);
      break;
    case Expr::Kind::Id:
      out = "id(" + ident(e.var) + ")";
      break;
    case Expr::Kind::Count:
      out = "count(" + ident(e.var) + ")";
      break;
    case Expr::Kind::CountStar:
      out = "count(*)";
      break;
    case Expr::Kind::AsNodeProperty:
      out = "gds.util.asNode(" + ident(e.var) + ")." + ident(e.key);
      break;
    case Expr::Kind::Literal:
      out = to_cypher_literal(e.literal);
      break;
  }
  return e.parenthesized ? "(" + out + ")" : out;
}

std::string ProjectItem::column() const {
  if (alias) return *alias;
  Expr bare = expr;
  bare.parenthesized = false;
  return render(bare);
}

std::string render(const QueryPlan& plan) {
  std::string out;
  auto add = [&](const std::string& s) {
    if (!out.empty()) out += ' ';
    out += s;
  };
  for (const auto& step : plan.steps) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, NodeScan>) {
            add("MATCH " + render_node(s.node));
          } else if constexpr (std::is_same_v<T, PathMatch>) {
            std::string p = render_node(s.nodes[0]);
            for (std::size_t i = 0; i < s.rels.size(); ++i) p += render_rel(s.rels[i]) + render_node(s.nodes[i + 1]);
            add("MATCH " + p);
          } else if constexpr (std::is_same_v<T, ProcedureCall>) {
            std::string c = "CALL " + s.name + "(";
            for (std::size_t i = 0; i < s.args.size(); ++i) {
              if (i) c += ", ";
              c += render_argument(s.args[i]);
            }
            c += ")";
            if (s.explicit_yield) {
              c += " YIELD ";
              for (std::size_t i = 0; i < s.yields.size(); ++i) {
                if (i) c += ", ";
                c += s.yields[i];
              }
            }
            add(c);
          } else if constexpr (std::is_same_v<T, Project> || std::is_same_v<T, Aggregate>) {
            add((s.is_with ? "WITH " : "RETURN ") + render_items(s.items));
          } else if constexpr (std::is_same_v<T, OrderLimit>) {
            if (s.key) add("ORDER BY " + render(*s.key) + (s.descending ? " DESC" : ""));
            if (s.limit) add("LIMIT " + std::to_string(*s.limit));
          }
        },
        step);
  }
  return out;
}

QueryPlan parse_cypher(std::string_view text) {
  Parser p(text);
  auto plan = p.statement();
  p.skip_semicolons();
  if (!p.at_end()) {
    auto rest = lex(text);  // re-lex only to report a precise span
    (void)rest;
    throw CypherSubsetError("unexpected trailing input", {0, text.size()});
  }
  return plan;
}

std::vector<QueryPlan> parse_script(std::string_view text) {
  Parser p(text);
  std::vector<QueryPlan> plans;
  p.skip_semicolons();
  while (!p.at_end()) {
    plans.push_back(p.statement());
    p.skip_semicolons();
  }
  if (plans.empty()) throw CypherSubsetError("empty script", {0, text.size()});
  return plans;
}

}  // namespace nlds::cypher

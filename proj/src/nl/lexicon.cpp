#include "nlds/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "nlds/csv.hpp"
#include "nlds/errors.hpp"

namespace nlds {

std::string normalize_phrase(std::string_view text) {
  std::string out;
  bool space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

namespace {

// Grammar terminals; see grammar.ebnf.
const std::vector<std::string>& grammar_terminals() {
  static const std::vector<std::string> words = {
      "find",      "get",          "show",        "list",      "give",     "display",
      "the",       "a",            "an",          "all",       "which",    "what",
      "is",        "are",          "there",       "of",        "for",      "where",
      "whose",     "with",         "within",      "in",        "on",       "and",
      "node",      "nodes",        "how many",    "in the study", "in the graph", "study",
      "graph",     "view",         "create",      "estimate",  "memory",   "required",
      "applying",  "apply",        "named as",    "relationship", "relation", "oriented",
      "maximum",   "max",          "iterations",  "iteration", "damping factor", "who",
      "have",      "has",          "that",        "having",    "by",       "synthea",
  };
  return words;
}

const std::vector<std::pair<std::string, AlgorithmKind>>& algorithm_names() {
  static const std::vector<std::pair<std::string, AlgorithmKind>> names = {
      {"pagerank", AlgorithmKind::PageRank},
      {"page rank", AlgorithmKind::PageRank},
      {"label propagation", AlgorithmKind::LabelPropagation},
      {"labelpropagation", AlgorithmKind::LabelPropagation},
      {"degree centrality", AlgorithmKind::DegreeCentrality},
  };
  return names;
}

std::map<std::string, std::set<AlgorithmKind>> builtin_keywords() {
  using K = AlgorithmKind;
  return {
      {"most important", {K::PageRank}},
      {"most popular", {K::DegreeCentrality, K::PageRank}},
      {"most influential", {K::PageRank}},
      {"classify", {K::LabelPropagation}},
      {"communities", {K::LabelPropagation}},
      {"community", {K::LabelPropagation}},
      {"groups", {K::LabelPropagation}},
      {"group", {K::LabelPropagation}},
      {"subgroup", {K::LabelPropagation}},
      {"subgroups", {K::LabelPropagation}},
      {"clusters", {K::LabelPropagation}},
  };
}

// Extra surface forms for the dataset's labels, applied only when the label exists.
const std::vector<std::pair<std::string, std::string>>& builtin_label_aliases() {
  static const std::vector<std::pair<std::string, std::string>> aliases = {
      {"drug", "Medications"},          {"drugs", "Medications"},
      {"medicine", "Medications"},      {"medicines", "Medications"},
      {"prescription", "Medications"},  {"prescriptions", "Medications"},
      {"immunisation", "Immunizations"}, {"immunisations", "Immunizations"},
      {"vaccine", "Immunizations"},     {"vaccines", "Immunizations"},
      {"diagnosis", "Conditions"},      {"diagnoses", "Conditions"},
  };
  return aliases;
}

const std::vector<ValueSynonym>& builtin_synonyms() {
  static const std::vector<ValueSynonym> synonyms = {
      {"RACE", "caucasian", "white"}, {"RACE", "white", "white"},
      {"RACE", "black", "black"},     {"RACE", "asian", "asian"},
      {"GENDER", "male", "M"},        {"GENDER", "men", "M"},
      {"GENDER", "female", "F"},      {"GENDER", "women", "F"},
  };
  return synonyms;
}

std::string lower(std::string_view s) { return normalize_phrase(s); }

std::string singular(const std::string& word) {
  if (word.size() > 3 && word.ends_with("ies")) return word.substr(0, word.size() - 3) + "y";
  if (word.size() > 1 && word.ends_with('s') && !word.ends_with("ss")) {
    return word.substr(0, word.size() - 1);
  }
  return word;
}

std::string plural(const std::string& word) {
  if (word.ends_with('s')) return word;
  if (word.ends_with('y') && word.size() > 1) return word.substr(0, word.size() - 1) + "ies";
  return word + "s";
}

// "CarePlans" -> "care plans"; empty when there is no inner capital.
std::string split_camel(const std::string& name) {
  std::string out;
  bool split = false;
  for (std::size_t i = 0; i < name.size(); ++i) {
    const auto c = static_cast<unsigned char>(name[i]);
    if (i > 0 && std::isupper(c) && std::islower(static_cast<unsigned char>(name[i - 1]))) {
      out += ' ';
      split = true;
    }
    out += static_cast<char>(std::tolower(c));
  }
  return split ? out : std::string{};
}

std::string replace_underscores(std::string s) {
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

std::size_t word_count(const std::string& phrase) {
  return phrase.empty() ? 0 : 1 + static_cast<std::size_t>(std::count(phrase.begin(), phrase.end(), ' '));
}

}  // namespace

void Lexicon::add(std::map<std::string, std::string>& table, const std::string& surface,
                  const std::string& target) {
  const auto key = normalize_phrase(surface);
  if (key.empty()) return;
  table.emplace(key, target);
  max_words_ = std::max(max_words_, word_count(key));
}

Lexicon bind_vocabulary(const GraphSchema& schema, const std::vector<ValueSynonym>& extras) {
  Lexicon lex;
  lex.schema_ = schema;
  lex.keywords_ = builtin_keywords();

  for (const auto& t : grammar_terminals()) {
    lex.terminals_.insert(t);
    lex.max_words_ = std::max(lex.max_words_, word_count(t));
  }
  for (const auto& [phrase, kind] : algorithm_names()) {
    lex.terminals_.insert(phrase);
    lex.max_words_ = std::max(lex.max_words_, word_count(phrase));
  }
  for (const auto& [phrase, kinds] : lex.keywords_) {
    lex.max_words_ = std::max(lex.max_words_, word_count(phrase));
  }

  for (const auto& label : schema.labels) {
    const auto l = lower(label);
    lex.add(lex.labels_, l, label);
    lex.add(lex.labels_, singular(l), label);
    lex.add(lex.labels_, plural(l), label);
    if (auto split = split_camel(label); !split.empty()) {
      lex.add(lex.labels_, split, label);
      lex.add(lex.labels_, singular(split), label);
    }
  }
  for (const auto& [alias, label] : builtin_label_aliases()) {
    if (schema.labels.count(label)) lex.add(lex.labels_, alias, label);
  }

  for (const auto& [type, ends] : schema.relationship_types) {
    lex.add(lex.relationships_, type, type);
    lex.add(lex.relationships_, replace_underscores(type), type);
  }

  for (const auto& prop : schema.all_properties()) {
    const auto p = lower(prop);
    lex.add(lex.properties_, p, prop);
    lex.add(lex.properties_, plural(p), prop);
    if (prop.find('_') != std::string::npos) lex.add(lex.properties_, replace_underscores(p), prop);
  }

  const auto props = schema.all_properties();
  for (const auto& s : builtin_synonyms()) {
    if (props.count(s.property)) lex.synonyms_.emplace(std::pair{s.property, lower(s.surface)}, s.canonical);
  }
  for (const auto& s : extras) {
    if (!props.count(s.property)) {
      throw VocabularyError("synonym '" + s.surface + "' refers to unknown property " + s.property);
    }
    const auto key = std::pair{s.property, lower(s.surface)};
    lex.synonyms_[key] = s.canonical;
    // The canonical value is accepted verbatim as well.
    lex.synonyms_.emplace(std::pair{s.property, lower(s.canonical)}, s.canonical);
    if (std::find(lex.extras_.begin(), lex.extras_.end(), s) == lex.extras_.end()) {
      lex.extras_.push_back(s);
    }
  }
  return lex;
}

std::optional<Term> Lexicon::lookup(std::string_view phrase) const {
  const auto key = normalize_phrase(phrase);
  if (terminals_.count(key) || keywords_.count(key)) return Term{TermKind::Keyword, key};
  if (auto it = labels_.find(key); it != labels_.end()) return Term{TermKind::Label, it->second};
  if (auto it = relationships_.find(key); it != relationships_.end()) {
    return Term{TermKind::Relationship, it->second};
  }
  if (auto it = properties_.find(key); it != properties_.end()) {
    return Term{TermKind::Property, it->second};
  }
  return std::nullopt;
}

std::optional<std::string> Lexicon::label(std::string_view surface) const {
  auto it = labels_.find(normalize_phrase(surface));
  if (it == labels_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Lexicon::relationship(std::string_view surface) const {
  auto it = relationships_.find(normalize_phrase(surface));
  if (it == relationships_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Lexicon::property(std::string_view surface) const {
  auto it = properties_.find(normalize_phrase(surface));
  if (it == properties_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Lexicon::synonym(const std::string& property,
                                            std::string_view surface) const {
  auto it = synonyms_.find(std::pair{property, normalize_phrase(surface)});
  if (it == synonyms_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::string, std::string>> Lexicon::synonym_owners(
    std::string_view surface) const {
  const auto key = normalize_phrase(surface);
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, canonical] : synonyms_) {
    if (k.second == key) out.emplace_back(k.first, canonical);
  }
  return out;
}

std::optional<AlgorithmKind> Lexicon::algorithm_name(std::string_view phrase) const {
  const auto key = normalize_phrase(phrase);
  for (const auto& [name, kind] : algorithm_names()) {
    if (name == key) return kind;
  }
  return std::nullopt;
}

std::vector<ValueSynonym> load_synonyms_csv(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  std::vector<ValueSynonym> out;
  auto take = [&](const csv::Row& row) {
    if (row.size() == 1 && row[0].empty()) return;
    if (row.size() != 3) {
      throw VocabularyError(path.string() + ": expected property,surface,canonical");
    }
    out.push_back({row[0], row[1], row[2]});
  };
  const bool has_header = table.header.size() == 3 && normalize_phrase(table.header[0]) == "property";
  if (!has_header && !table.header.empty()) take(table.header);
  for (const auto& row : table.rows) take(row);
  return out;
}

void append_synonym_csv(const std::filesystem::path& path, const ValueSynonym& synonym) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot write " + path.string());
  if (fresh) csv::write_row(out, {"property", "surface", "canonical"});
  csv::write_row(out, {synonym.property, synonym.surface, synonym.canonical});
}

}  // namespace nlds

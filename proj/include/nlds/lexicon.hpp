#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlds/graph.hpp"
#include "nlds/question.hpp"

namespace nlds {

/// (property, surface form) -> canonical stored value.
struct ValueSynonym {
  std::string property;
  std::string surface;
  std::string canonical;
  bool operator==(const ValueSynonym&) const = default;
};

enum class TermKind { Keyword, Label, Relationship, Property };

struct Term {
  TermKind kind;
  std::string resolved;  // canonical schema name; lowercase phrase for keywords
};

/// Binding of the grammar's open slots to a schema. Immutable; extending the
/// vocabulary means binding a new Lexicon.
class Lexicon {
 public:
  Lexicon() = default;

  [[nodiscard]] const GraphSchema& schema() const { return schema_; }

  /// Longest phrase (in words) stored in any surface table.
  [[nodiscard]] std::size_t max_phrase_words() const { return max_words_; }

  /// Case-insensitive lookup of a whitespace-normalized phrase. When a phrase
  /// is several kinds of term, Keyword wins, then Label, Relationship, Property.
  [[nodiscard]] std::optional<Term> lookup(std::string_view phrase) const;

  [[nodiscard]] std::optional<std::string> label(std::string_view surface) const;
  [[nodiscard]] std::optional<std::string> relationship(std::string_view surface) const;
  [[nodiscard]] std::optional<std::string> property(std::string_view surface) const;

  /// Canonical value for `surface` under `property`, if a synonym exists.
  [[nodiscard]] std::optional<std::string> synonym(const std::string& property,
                                                   std::string_view surface) const;
  /// Every (property, canonical) pair whose synonym surface is `surface`,
  /// ordered by property name.
  [[nodiscard]] std::vector<std::pair<std::string, std::string>> synonym_owners(
      std::string_view surface) const;

  [[nodiscard]] const std::map<std::string, std::set<AlgorithmKind>>& keyword_table() const {
    return keywords_;
  }
  /// Algorithm named directly, e.g. "page rank" or "PageRank".
  [[nodiscard]] std::optional<AlgorithmKind> algorithm_name(std::string_view phrase) const;

  [[nodiscard]] const std::vector<ValueSynonym>& extra_synonyms() const { return extras_; }

 private:
  friend Lexicon bind_vocabulary(const GraphSchema&, const std::vector<ValueSynonym>&);

  void add(std::map<std::string, std::string>& table, const std::string& surface,
           const std::string& target);

  GraphSchema schema_;
  std::map<std::string, std::string> labels_;
  std::map<std::string, std::string> relationships_;
  std::map<std::string, std::string> properties_;
  std::map<std::pair<std::string, std::string>, std::string> synonyms_;  // (property, surface)
  std::map<std::string, std::set<AlgorithmKind>> keywords_;
  std::set<std::string> terminals_;
  std::vector<ValueSynonym> extras_;
  std::size_t max_words_ = 1;
};

/// Builds the lexicon for `schema`. Throws VocabularyError when an extra
/// synonym names a property absent from the schema.
Lexicon bind_vocabulary(const GraphSchema& schema, const std::vector<ValueSynonym>& extras = {});

/// Reads `property,surface,canonical` rows; a header row with those names is skipped.
std::vector<ValueSynonym> load_synonyms_csv(const std::filesystem::path& path);
void append_synonym_csv(const std::filesystem::path& path, const ValueSynonym& synonym);

/// Lowercases ASCII letters and collapses whitespace runs to one space.
std::string normalize_phrase(std::string_view text);

}  // namespace nlds

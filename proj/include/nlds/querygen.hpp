#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nlds/graph.hpp"
#include "nlds/lexicon.hpp"
#include "nlds/question.hpp"

namespace nlds {

enum class CandidateKind { Navigational, DataScience };

std::string_view to_string(CandidateKind kind);

/// One generated interpretation of a question.
struct QueryCandidate {
  std::string id;  // lowercase hex FNV-1a of the rendered script
  std::vector<std::string> script;
  CandidateKind kind = CandidateKind::Navigational;
  std::optional<AlgorithmKind> algorithm;
  std::string explanation;
  double score = 0.0;
  std::string production;  // grammar production the candidate came from

  /// "Navigational" or the algorithm name; the feedback key's second half.
  [[nodiscard]] std::string feedback_kind() const;
  /// Statements joined by ";\n".
  [[nodiscard]] std::string rendered() const;

  bool operator==(const QueryCandidate&) const = default;
};

/// 64-bit FNV-1a over the bytes of `text`.
std::uint64_t fnv1a64(std::string_view text);
/// 16 lowercase hex digits.
std::string candidate_id(const std::vector<std::string>& script);

/// Star ratings keyed by (production, feedback kind).
class FeedbackStore {
 public:
  struct Tally {
    std::int64_t sum = 0;
    std::int64_t count = 0;
    [[nodiscard]] double mean() const { return count ? static_cast<double>(sum) / count : 0.0; }
    bool operator==(const Tally&) const = default;
  };
  using Key = std::pair<std::string, std::string>;

  /// Throws ValidationError unless 1 <= stars <= 5.
  void record(const std::string& production, const std::string& kind, int stars);
  void set(const Key& key, Tally tally) { tallies_[key] = tally; }
  [[nodiscard]] std::optional<Tally> find(const std::string& production, const std::string& kind) const;
  [[nodiscard]] const std::map<Key, Tally>& tallies() const { return tallies_; }

 private:
  std::map<Key, Tally> tallies_;
};

/// Score given to candidates without feedback.
inline constexpr double kDefaultScore = 3.0;

/// Stable re-ordering by mean stars, unseen keys scoring kDefaultScore.
std::vector<QueryCandidate> rank_candidates(std::vector<QueryCandidate> candidates,
                                            const FeedbackStore& feedback, const std::string& production);

/// Lexicon keyword-table entry for `phrase`; throws KeywordError if absent.
std::set<AlgorithmKind> map_keyword_to_algorithms(const std::string& phrase, const Lexicon& lexicon);

/// Defaults applied when a question leaves them out.
struct GenerationDefaults {
  std::string view_name = "my_graph";
  std::int64_t pagerank_iterations = 20;
  double damping_factor = 0.85;
  std::int64_t label_propagation_iterations = 20;
  std::int64_t pagerank_limit = 10;
  std::int64_t community_limit = 5;
};

/// The graph view a Centrality or Community question runs its algorithms on.
struct ViewRequirement {
  std::string view;
  std::string node_label;
  std::string rel_type;
  Orientation orientation = Orientation::Natural;
};
std::optional<ViewRequirement> required_view(const QuestionAST& ast, const GenerationDefaults& defaults = {});

/// Expands one AST into Cypher candidates. Views already in `existing_views`
/// are reused and their create statement is omitted. Throws GenerationError
/// when a centrality or community relationship type does not touch the node label.
std::vector<QueryCandidate> generate(const QuestionAST& ast, const GraphSchema& schema,
                                     const Lexicon& lexicon, const std::set<std::string>& existing_views,
                                     const GenerationDefaults& defaults = {});

}  // namespace nlds

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlds/engine.hpp"
#include "nlds/errors.hpp"
#include "nlds/lexicon.hpp"
#include "nlds/querygen.hpp"

namespace nlds {

/// Why a question produced no candidates.
struct Diagnostics {
  std::string kind;  // "ParseError", "GenerationError", ...
  std::string message;
  Span matched;
  std::vector<std::string> productions;
};

struct SessionTurn {
  std::int64_t turn_id = 0;
  std::string question;
  std::size_t ast_count = 0;
  std::vector<QueryCandidate> candidates;
  std::optional<Diagnostics> diagnostics;
  std::optional<std::string> chosen;  // candidate id, or "raw" for an edited script
  std::optional<ResultTable> result;
  std::vector<StatementEstimate> estimates;
  std::optional<int> stars;
  std::string timestamp;
};

struct QuestionResponse {
  std::int64_t turn_id = 0;
  std::vector<QueryCandidate> candidates;
  std::optional<Diagnostics> diagnostics;
};

struct ExecuteResponse {
  ResultTable table;
  std::vector<StatementEstimate> estimates;
};

struct FeedbackResponse {
  std::string production;
  std::string kind;
  FeedbackStore::Tally tally;
};

struct ReplayMismatch {
  std::size_t line = 0;  // 1-based log line
  std::string what;
};

struct ReplayReport {
  std::size_t events = 0;
  std::vector<ReplayMismatch> mismatches;
  [[nodiscard]] bool ok() const { return mismatches.empty(); }
};

struct ServiceOptions {
  /// Directory for <session-id>.jsonl logs; no logging when empty.
  std::filesystem::path log_dir;
  /// property,surface,canonical rows loaded at start-up and appended to by add_synonym.
  std::filesystem::path synonyms_csv;
  GenerationDefaults defaults;
  /// Returns an ISO-8601 timestamp; replaceable for tests.
  std::function<std::string()> clock;
};

/// Conversational front end over one read-only dataset. Calls on different
/// sessions run concurrently; calls on one session are serialized. Every
/// mutating call appends to the session's log before returning.
class SessionService {
 public:
  SessionService(std::shared_ptr<const PropertyGraph> graph, ServiceOptions options = {});
  ~SessionService();
  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  [[nodiscard]] const PropertyGraph& graph() const { return *graph_; }
  [[nodiscard]] const GraphSchema& schema() const { return schema_; }
  [[nodiscard]] GraphSummary summary() const { return summary_; }
  /// Throws SessionNotFound for unknown ids.
  [[nodiscard]] GraphSummary summary(const std::string& session_id) const;

  std::string create_session();
  /// Same, with a caller-chosen id. Throws ValidationError if taken or malformed.
  std::string create_session(const std::string& session_id);
  [[nodiscard]] bool has_session(const std::string& session_id) const;

  QuestionResponse post_question(const std::string& session_id, const std::string& text);
  ExecuteResponse execute_candidate(const std::string& session_id, std::int64_t turn_id,
                                    const std::string& candidate_id);
  /// Runs an edited script. With a turn id the result is stored on that turn.
  ExecuteResponse execute_raw(const std::string& session_id, const std::string& script,
                              std::optional<std::int64_t> turn_id = std::nullopt);
  FeedbackResponse record_feedback(const std::string& session_id, std::int64_t turn_id, int stars);
  /// Returns the lexicon version after the call; unchanged for a synonym already known.
  std::int64_t add_synonym(const std::string& session_id, const ValueSynonym& synonym);

  [[nodiscard]] std::vector<SessionTurn> turns(const std::string& session_id) const;
  [[nodiscard]] std::int64_t lexicon_version(const std::string& session_id) const;
  [[nodiscard]] std::set<std::string> view_names(const std::string& session_id) const;
  [[nodiscard]] FeedbackStore feedback(const std::string& session_id) const;
  [[nodiscard]] std::filesystem::path log_path(const std::string& session_id) const;

 private:
  struct Session;
  friend ReplayReport replay_log(const std::filesystem::path& log, SessionService& service);

  std::string open_session(const std::string& session_id, std::optional<std::vector<ValueSynonym>> synonyms);
  std::shared_ptr<Session> find(const std::string& session_id) const;
  void log(Session& s, nlohmann::json event);

  std::shared_ptr<const PropertyGraph> graph_;
  GraphSchema schema_;
  GraphSummary summary_;
  ServiceOptions options_;

  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::vector<ValueSynonym> synonyms_;  // shared base vocabulary, guarded by mutex_
};

// JSON wire format shared by the HTTP server, the CLI and the log.
nlohmann::json to_json(const QueryCandidate& c);
nlohmann::json to_json(const Diagnostics& d);
nlohmann::json to_json(const QuestionResponse& r);
nlohmann::json to_json(const ExecuteResponse& r);
nlohmann::json to_json(const FeedbackResponse& r);
nlohmann::json to_json(const GraphSummary& s);
nlohmann::json to_json(const GraphSchema& s);

/// Re-runs every event of a session log in a fresh session of `service` and
/// compares candidate ids and result tables with the logged ones.
ReplayReport replay_log(const std::filesystem::path& log, SessionService& service);

}  // namespace nlds

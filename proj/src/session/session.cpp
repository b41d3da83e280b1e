#include "nlds/session.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <random>

#include "nlds/parser.hpp"
#include "nlds/tokenizer.hpp"

namespace nlds {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool valid_session_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
  });
}

nlohmann::json synonyms_to_json(const std::vector<ValueSynonym>& synonyms) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : synonyms) out.push_back({s.property, s.surface, s.canonical});
  return out;
}

std::vector<ValueSynonym> synonyms_from_json(const nlohmann::json& j) {
  std::vector<ValueSynonym> out;
  for (const auto& row : j) out.push_back({row.at(0), row.at(1), row.at(2)});
  return out;
}

nlohmann::json estimates_to_json(const std::vector<StatementEstimate>& estimates) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : estimates) {
    auto j = estimate_to_json(e.estimate);
    j["statement"] = e.statement_index;
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const QueryCandidate& c) {
  return {{"id", c.id},
          {"script", c.script},
          {"kind", std::string(to_string(c.kind))},
          {"algorithm", c.algorithm ? nlohmann::json(std::string(to_string(*c.algorithm))) : nlohmann::json()},
          {"explanation", c.explanation},
          {"score", c.score},
          {"production", c.production}};
}

nlohmann::json to_json(const Diagnostics& d) {
  return {{"kind", d.kind},
          {"message", d.message},
          {"matched", {{"start", d.matched.start}, {"end", d.matched.end}}},
          {"productions", d.productions}};
}

nlohmann::json to_json(const QuestionResponse& r) {
  nlohmann::json candidates = nlohmann::json::array();
  for (const auto& c : r.candidates) candidates.push_back(to_json(c));
  nlohmann::json out = {{"turn_id", r.turn_id}, {"candidates", std::move(candidates)}};
  if (r.diagnostics) out["diagnostics"] = to_json(*r.diagnostics);
  return out;
}

nlohmann::json to_json(const ExecuteResponse& r) {
  auto out = r.table.to_json();
  out["estimates"] = estimates_to_json(r.estimates);
  return out;
}

nlohmann::json to_json(const FeedbackResponse& r) {
  return {{"production", r.production},
          {"kind", r.kind},
          {"sum", r.tally.sum},
          {"count", r.tally.count},
          {"mean", r.tally.mean()}};
}

nlohmann::json to_json(const GraphSummary& s) {
  return {{"node_count", s.node_count},
          {"relationship_count", s.relationship_count},
          {"per_label", s.per_label},
          {"per_type", s.per_type}};
}

nlohmann::json to_json(const GraphSchema& s) {
  nlohmann::json types = nlohmann::json::array();
  for (const auto& [type, ends] : s.relationship_types) {
    types.push_back({{"type", type}, {"source", ends.first}, {"target", ends.second}});
  }
  nlohmann::json props = nlohmann::json::object();
  for (const auto& [label, names] : s.properties) props[label] = names;
  return {{"labels", s.labels}, {"relationship_types", std::move(types)}, {"properties", std::move(props)}};
}

// ---------------------------------------------------------------------------
// Service

struct SessionService::Session {
  std::mutex mutex;
  std::string id;
  std::vector<ValueSynonym> synonyms;
  Lexicon lexicon;
  std::int64_t lexicon_version = 0;
  ViewCatalog views;
  std::vector<SessionTurn> turns;
  FeedbackStore feedback;
  std::filesystem::path log_path;

  SessionTurn& turn(std::int64_t turn_id) {
    for (auto& t : turns) {
      if (t.turn_id == turn_id) return t;
    }
    throw CandidateNotFound("turn " + std::to_string(turn_id) + " does not exist in this session");
  }
};

SessionService::SessionService(std::shared_ptr<const PropertyGraph> graph, ServiceOptions options)
    : graph_(std::move(graph)), options_(std::move(options)) {
  if (!graph_) throw ValidationError("session service needs a graph");
  schema_ = extract_schema(*graph_);
  summary_ = graph_summary(*graph_);
  if (!options_.clock) options_.clock = utc_now;
  if (!options_.synonyms_csv.empty() && std::filesystem::exists(options_.synonyms_csv)) {
    synonyms_ = load_synonyms_csv(options_.synonyms_csv);
  }
  bind_vocabulary(schema_, synonyms_);  // fail fast on a bad synonyms file
  if (!options_.log_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(options_.log_dir, ec);
    if (ec) throw IoError("cannot create log directory " + options_.log_dir.string() + ": " + ec.message());
  }
}

SessionService::~SessionService() = default;

GraphSummary SessionService::summary(const std::string& session_id) const {
  find(session_id);
  return summary_;
}

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& session_id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw SessionNotFound("session '" + session_id + "' does not exist");
  return it->second;
}

bool SessionService::has_session(const std::string& session_id) const {
  std::shared_lock lock(mutex_);
  return sessions_.count(session_id) > 0;
}

std::filesystem::path SessionService::log_path(const std::string& session_id) const {
  return find(session_id)->log_path;
}

std::string SessionService::create_session() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  for (;;) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
    std::string id(buf);
    if (!has_session(id) && (options_.log_dir.empty() || !std::filesystem::exists(options_.log_dir / (id + ".jsonl")))) {
      return create_session(id);
    }
  }
}

std::string SessionService::create_session(const std::string& session_id) {
  return open_session(session_id, std::nullopt);
}

std::string SessionService::open_session(const std::string& session_id,
                                         std::optional<std::vector<ValueSynonym>> synonyms) {
  if (!valid_session_id(session_id)) throw ValidationError("session ids use letters, digits, '-' and '_'");
  auto s = std::make_shared<Session>();
  s->id = session_id;
  {
    std::unique_lock lock(mutex_);
    if (sessions_.count(session_id)) throw ValidationError("session '" + session_id + "' already exists");
    s->synonyms = synonyms ? std::move(*synonyms) : synonyms_;
    s->lexicon = bind_vocabulary(schema_, s->synonyms);
    if (!options_.log_dir.empty()) s->log_path = options_.log_dir / (session_id + ".jsonl");
    sessions_.emplace(session_id, s);
  }
  std::lock_guard guard(s->mutex);
  log(*s, {{"event", "session"},
           {"session_id", session_id},
           {"synonyms", synonyms_to_json(s->synonyms)},
           {"nodes", summary_.node_count},
           {"relationships", summary_.relationship_count}});
  return session_id;
}

void SessionService::log(Session& s, nlohmann::json event) {
  if (s.log_path.empty()) return;
  event["timestamp"] = options_.clock();
  std::ofstream out(s.log_path, std::ios::app | std::ios::binary);
  out << event.dump() << '\n';
  out.flush();
  if (!out) throw IoError("cannot append to session log " + s.log_path.string());
}

QuestionResponse SessionService::post_question(const std::string& session_id, const std::string& text) {
  auto s = find(session_id);
  std::lock_guard guard(s->mutex);

  SessionTurn turn;
  turn.turn_id = s->turns.empty() ? 1 : s->turns.back().turn_id + 1;
  turn.question = text;
  turn.timestamp = options_.clock();

  std::vector<QuestionAST> asts;
  try {
    asts = parse_question(text, s->lexicon);
  } catch (const ParseError& e) {
    turn.diagnostics = Diagnostics{"ParseError", e.what(), e.matched(), e.productions()};
  } catch (const ValidationError& e) {
    turn.diagnostics = Diagnostics{"ValidationError", e.what(), {}, {}};
  }
  turn.ast_count = asts.size();

  const auto catalog = s->views.names();
  std::set<std::string> seen;
  std::optional<Diagnostics> generation_error;
  for (const auto& ast : asts) {
    // A view is only reused when it was built from the same label, type and orientation.
    std::set<std::string> reusable = catalog;
    if (auto req = required_view(ast, options_.defaults)) {
      reusable.clear();
      if (catalog.count(req->view)) {
        const auto view = s->views.find(req->view);
        if (view->node_label == req->node_label && view->rel_type == req->rel_type &&
            view->orientation == req->orientation) {
          reusable.insert(req->view);
        }
      }
    }
    try {
      for (auto& c : generate(ast, schema_, s->lexicon, reusable, options_.defaults)) {
        if (seen.insert(c.id).second) turn.candidates.push_back(std::move(c));
      }
    } catch (const Error& e) {
      if (!generation_error) generation_error = Diagnostics{error_kind(e), e.what(), {}, {std::string(production_name(ast))}};
    }
  }
  if (turn.candidates.empty() && !turn.diagnostics && generation_error) turn.diagnostics = generation_error;

  for (auto& c : turn.candidates) {
    const auto tally = s->feedback.find(c.production, c.feedback_kind());
    c.score = tally ? tally->mean() : kDefaultScore;
  }
  std::stable_sort(turn.candidates.begin(), turn.candidates.end(),
                   [](const QueryCandidate& a, const QueryCandidate& b) { return a.score > b.score; });

  QuestionResponse response{turn.turn_id, turn.candidates, turn.diagnostics};
  auto event = to_json(response);
  event["event"] = "question";
  event["text"] = text;
  event["asts"] = turn.ast_count;
  s->turns.push_back(std::move(turn));
  log(*s, std::move(event));
  return response;
}

ExecuteResponse SessionService::execute_candidate(const std::string& session_id, std::int64_t turn_id,
                                                  const std::string& candidate_id) {
  auto s = find(session_id);
  std::lock_guard guard(s->mutex);
  auto& turn = s->turn(turn_id);
  auto it = std::find_if(turn.candidates.begin(), turn.candidates.end(),
                         [&](const QueryCandidate& c) { return c.id == candidate_id; });
  if (it == turn.candidates.end()) {
    throw CandidateNotFound("candidate " + candidate_id + " does not belong to turn " + std::to_string(turn_id));
  }

  nlohmann::json event = {{"event", "execute"}, {"turn_id", turn_id}, {"candidate_id", candidate_id}};
  try {
    auto r = execute_script(it->script, *graph_, s->views, {true});
    ExecuteResponse response{std::move(r.table), std::move(r.estimates)};
    turn.chosen = candidate_id;
    turn.result = response.table;
    turn.estimates = response.estimates;
    event["result"] = to_json(response);
    log(*s, std::move(event));
    return response;
  } catch (const ExecutionError& e) {
    event["error"] = {{"kind", e.kind()}, {"statement", e.statement_index()}, {"message", e.what()}};
    log(*s, std::move(event));
    throw;
  }
}

ExecuteResponse SessionService::execute_raw(const std::string& session_id, const std::string& script,
                                            std::optional<std::int64_t> turn_id) {
  auto s = find(session_id);
  std::lock_guard guard(s->mutex);
  SessionTurn* turn = turn_id ? &s->turn(*turn_id) : nullptr;

  nlohmann::json event = {{"event", "execute"}, {"raw_script", script}};
  if (turn_id) event["turn_id"] = *turn_id;
  try {
    auto r = execute_script(std::string_view(script), *graph_, s->views, {true});
    ExecuteResponse response{std::move(r.table), std::move(r.estimates)};
    if (turn) {
      turn->chosen = "raw";
      turn->result = response.table;
      turn->estimates = response.estimates;
    }
    event["result"] = to_json(response);
    log(*s, std::move(event));
    return response;
  } catch (const ExecutionError& e) {
    event["error"] = {{"kind", e.kind()}, {"statement", e.statement_index()}, {"message", e.what()}};
    log(*s, std::move(event));
    throw;
  }
}

FeedbackResponse SessionService::record_feedback(const std::string& session_id, std::int64_t turn_id, int stars) {
  if (stars < 1 || stars > 5) throw ValidationError("stars must be between 1 and 5");
  auto s = find(session_id);
  std::lock_guard guard(s->mutex);
  auto& turn = s->turn(turn_id);
  if (turn.candidates.empty()) throw ValidationError("turn " + std::to_string(turn_id) + " has no candidates to rate");
  if (turn.stars) throw ValidationError("turn " + std::to_string(turn_id) + " is already rated");

  const QueryCandidate* rated = &turn.candidates.front();
  if (turn.chosen) {
    for (const auto& c : turn.candidates) {
      if (c.id == *turn.chosen) rated = &c;
    }
  }
  s->feedback.record(rated->production, rated->feedback_kind(), stars);
  turn.stars = stars;
  FeedbackResponse response{rated->production, rated->feedback_kind(),
                            *s->feedback.find(rated->production, rated->feedback_kind())};
  auto event = to_json(response);
  event["event"] = "feedback";
  event["turn_id"] = turn_id;
  event["stars"] = stars;
  event["candidate_id"] = rated->id;
  log(*s, std::move(event));
  return response;
}

std::int64_t SessionService::add_synonym(const std::string& session_id, const ValueSynonym& synonym) {
  auto s = find(session_id);
  std::lock_guard guard(s->mutex);
  const auto surface = normalize_phrase(synonym.surface);
  if (surface.empty() || synonym.canonical.empty()) throw ValidationError("surface and canonical must be non-empty");
  const ValueSynonym entry{synonym.property, surface, synonym.canonical};

  auto same_key = [&](const ValueSynonym& v) { return v.property == entry.property && v.surface == entry.surface; };
  auto existing = std::find_if(s->synonyms.begin(), s->synonyms.end(), same_key);
  if (existing != s->synonyms.end() && *existing == entry) return s->lexicon_version;

  auto synonyms = s->synonyms;
  synonyms.erase(std::remove_if(synonyms.begin(), synonyms.end(), same_key), synonyms.end());
  synonyms.push_back(entry);
  Lexicon lexicon = bind_vocabulary(schema_, synonyms);  // throws VocabularyError before anything changes

  {
    std::unique_lock lock(mutex_);
    if (!options_.synonyms_csv.empty()) append_synonym_csv(options_.synonyms_csv, entry);
    synonyms_.erase(std::remove_if(synonyms_.begin(), synonyms_.end(), same_key), synonyms_.end());
    synonyms_.push_back(entry);
  }
  s->synonyms = std::move(synonyms);
  s->lexicon = std::move(lexicon);
  ++s->lexicon_version;
  log(*s, {{"event", "vocabulary"},
           {"property", entry.property},
           {"surface", entry.surface},
           {"canonical", entry.canonical},
           {"version", s->lexicon_version}});
  return s->lexicon_version;
}

std::vector<SessionTurn> SessionService::turns(const std::string& session_id) const {
  auto s = find(session_id);
  std::lock_guard guard(s->mutex);
  return s->turns;
}

std::int64_t SessionService::lexicon_version(const std::string& session_id) const {
  auto s = find(session_id);
  std::lock_guard guard(s->mutex);
  return s->lexicon_version;
}

std::set<std::string> SessionService::view_names(const std::string& session_id) const {
  return find(session_id)->views.names();
}

FeedbackStore SessionService::feedback(const std::string& session_id) const {
  auto s = find(session_id);
  std::lock_guard guard(s->mutex);
  return s->feedback;
}

// ---------------------------------------------------------------------------
// Replay

namespace {

std::vector<std::string> candidate_ids(const nlohmann::json& candidates) {
  std::vector<std::string> ids;
  for (const auto& c : candidates) ids.push_back(c.at("id").get<std::string>());
  return ids;
}

std::string joined(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ",") + id;
  return "[" + out + "]";
}

}  // namespace

ReplayReport replay_log(const std::filesystem::path& log, SessionService& service) {
  std::ifstream in(log, std::ios::binary);
  if (!in) throw IoError("cannot open session log " + log.string());

  ReplayReport report;
  std::string session;
  std::string line;
  std::size_t number = 0;
  auto mismatch = [&](std::string what) { report.mismatches.push_back({number, std::move(what)}); };

  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json event;
    try {
      event = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("log line " + std::to_string(number) + " is not JSON: " + e.what());
    }
    ++report.events;
    const auto type = event.value("event", std::string());

    if (type == "session") {
      if (!session.empty()) throw ValidationError("log line " + std::to_string(number) + " starts a second session");
      std::mt19937_64 rng{std::random_device{}()};
      do {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
        session = std::string("replay-") + buf;
      } while (service.has_session(session));
      service.open_session(session, synonyms_from_json(event.at("synonyms")));
      continue;
    }
    if (session.empty()) throw ValidationError("log does not start with a session event");

    if (type == "question") {
      const auto r = service.post_question(session, event.at("text").get<std::string>());
      std::vector<std::string> ids;
      for (const auto& c : r.candidates) ids.push_back(c.id);
      const auto logged = candidate_ids(event.at("candidates"));
      if (ids != logged) mismatch("candidate ids " + joined(ids) + " differ from logged " + joined(logged));
      if (r.turn_id != event.at("turn_id").get<std::int64_t>()) mismatch("turn id differs");
    } else if (type == "execute") {
      std::optional<ExecuteResponse> r;
      nlohmann::json error;
      try {
        if (event.contains("raw_script")) {
          std::optional<std::int64_t> turn;
          if (event.contains("turn_id")) turn = event.at("turn_id").get<std::int64_t>();
          r = service.execute_raw(session, event.at("raw_script").get<std::string>(), turn);
        } else {
          r = service.execute_candidate(session, event.at("turn_id").get<std::int64_t>(),
                                        event.at("candidate_id").get<std::string>());
        }
      } catch (const ExecutionError& e) {
        error = {{"kind", e.kind()}, {"statement", e.statement_index()}};
      }
      if (event.contains("error")) {
        const auto& logged = event.at("error");
        if (error.is_null()) {
          mismatch("execution succeeded but the log records a " + logged.at("kind").get<std::string>());
        } else if (error.at("kind") != logged.at("kind") || error.at("statement") != logged.at("statement")) {
          mismatch("execution failed differently: " + error.dump());
        }
      } else if (!r) {
        mismatch("execution failed: " + error.dump());
      } else if (to_json(*r) != event.at("result")) {
        mismatch("result table differs from the logged one");
      }
    } else if (type == "feedback") {
      const auto r = service.record_feedback(session, event.at("turn_id").get<std::int64_t>(),
                                             event.at("stars").get<int>());
      if (r.production != event.at("production") || r.kind != event.at("kind") ||
          r.tally.count != event.at("count").get<std::int64_t>() ||
          r.tally.sum != event.at("sum").get<std::int64_t>()) {
        mismatch("feedback tally differs");
      }
    } else if (type == "vocabulary") {
      const auto version = service.add_synonym(
          session, {event.at("property"), event.at("surface"), event.at("canonical")});
      if (version != event.at("version").get<std::int64_t>()) mismatch("lexicon version differs");
    } else {
      throw ValidationError("log line " + std::to_string(number) + " has unknown event '" + type + "'");
    }
  }
  return report;
}

}  // namespace nlds

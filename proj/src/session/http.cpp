#include "nlds/http.hpp"

#include <httplib.h>

namespace nlds {

int http_status(const std::exception& e) {
  if (dynamic_cast<const SessionNotFound*>(&e) || dynamic_cast<const CandidateNotFound*>(&e)) return 404;
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const VocabularyError*>(&e) ||
      dynamic_cast<const nlohmann::json::exception*>(&e)) {
    return 400;
  }
  if (dynamic_cast<const ViewExists*>(&e)) return 409;
  if (const auto* x = dynamic_cast<const ExecutionError*>(&e)) return x->kind() == "ViewExists" ? 409 : 422;
  if (dynamic_cast<const Error*>(&e)) return 422;
  return 500;
}

nlohmann::json error_body(const std::exception& e) {
  const bool json_error = dynamic_cast<const nlohmann::json::exception*>(&e) != nullptr;
  nlohmann::json body = {{"error", json_error ? std::string("ValidationError") : error_kind(e)},
                         {"message", e.what()}};
  if (const auto* x = dynamic_cast<const ExecutionError*>(&e)) {
    body["statement"] = x->statement_index();
    body["cause"] = x->kind();
  }
  return body;
}

namespace {

void reply(httplib::Response& res, const nlohmann::json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

nlohmann::json body_of(const httplib::Request& req) {
  auto j = nlohmann::json::parse(req.body.empty() ? std::string("{}") : req.body);
  if (!j.is_object()) throw ValidationError("request body must be a JSON object");
  return j;
}

template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const std::exception& e) {
      reply(res, error_body(e), http_status(e));
    }
  };
}

}  // namespace

void register_routes(httplib::Server& server, SessionService& service) {
  server.Get("/api/schema", guarded([&service](const httplib::Request&, httplib::Response& res) {
    reply(res, to_json(service.schema()));
  }));

  server.Get("/api/summary", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const auto summary = req.has_param("session") ? service.summary(req.get_param_value("session")) : service.summary();
    reply(res, to_json(summary));
  }));

  server.Post("/api/session", guarded([&service](const httplib::Request&, httplib::Response& res) {
    reply(res, {{"session_id", service.create_session()}}, 201);
  }));

  server.Get("/api/session/:id", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const auto& id = req.path_params.at("id");
    nlohmann::json turns = nlohmann::json::array();
    for (const auto& t : service.turns(id)) {
      nlohmann::json candidates = nlohmann::json::array();
      for (const auto& c : t.candidates) candidates.push_back(to_json(c));
      nlohmann::json turn = {{"turn_id", t.turn_id},
                             {"question", t.question},
                             {"candidates", std::move(candidates)},
                             {"timestamp", t.timestamp}};
      if (t.chosen) turn["chosen"] = *t.chosen;
      if (t.stars) turn["stars"] = *t.stars;
      if (t.result) turn["result"] = t.result->to_json();
      turns.push_back(std::move(turn));
    }
    reply(res, {{"session_id", id}, {"lexicon_version", service.lexicon_version(id)},
                {"views", service.view_names(id)}, {"turns", std::move(turns)}});
  }));

  server.Post("/api/session/:id/question", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const auto body = body_of(req);
    const auto text = body.at("text").get<std::string>();
    reply(res, to_json(service.post_question(req.path_params.at("id"), text)));
  }));

  server.Post("/api/session/:id/execute", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const auto body = body_of(req);
    const auto& id = req.path_params.at("id");
    if (body.contains("raw_script")) {
      std::optional<std::int64_t> turn;
      if (body.contains("turn_id")) turn = body.at("turn_id").get<std::int64_t>();
      reply(res, to_json(service.execute_raw(id, body.at("raw_script").get<std::string>(), turn)));
      return;
    }
    reply(res, to_json(service.execute_candidate(id, body.at("turn_id").get<std::int64_t>(),
                                                 body.at("candidate_id").get<std::string>())));
  }));

  server.Post("/api/session/:id/feedback", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const auto body = body_of(req);
    reply(res, to_json(service.record_feedback(req.path_params.at("id"), body.at("turn_id").get<std::int64_t>(),
                                               body.at("stars").get<int>())));
  }));

  server.Post("/api/session/:id/vocabulary", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const auto body = body_of(req);
    const ValueSynonym synonym{body.at("property").get<std::string>(), body.at("surface").get<std::string>(),
                               body.at("canonical").get<std::string>()};
    reply(res, {{"lexicon_version", service.add_synonym(req.path_params.at("id"), synonym)}});
  }));
}

}  // namespace nlds

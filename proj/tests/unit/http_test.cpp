#include <doctest.h>
#include <httplib.h>

#include <thread>

#include "nlds/http.hpp"
#include "oracles.hpp"
#include "scratch.hpp"

using namespace nlds;
using json = nlohmann::json;

namespace {

class Fixture {
 public:
  Fixture() {
    generate_synthetic(42, 200, data_.path);
    graph_ = std::make_shared<const PropertyGraph>(load_csv_dataset(data_.path));
    ServiceOptions options;
    options.log_dir = logs_.path;
    options.synonyms_csv = logs_.path / "synonyms.csv";
    service_ = std::make_unique<SessionService>(graph_, options);
    register_routes(server_, *service_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~Fixture() {
    server_.stop();
    thread_.join();
  }

  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }
  const test::ScratchDir& data() const { return data_; }
  SessionService& service() { return *service_; }

 private:
  test::ScratchDir data_;
  test::ScratchDir logs_;
  std::shared_ptr<const PropertyGraph> graph_;
  std::unique_ptr<SessionService> service_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

struct Reply {
  int status = 0;
  json body;
};

Reply post(const std::string& path, const json& body) {
  auto res = fixture().client().Post(path, body.dump(), "application/json");
  REQUIRE(res);
  return {res->status, json::parse(res->body)};
}

Reply post_text(const std::string& path, const std::string& body) {
  auto res = fixture().client().Post(path, body, "application/json");
  REQUIRE(res);
  return {res->status, json::parse(res->body)};
}

Reply get(const std::string& path) {
  auto res = fixture().client().Get(path);
  REQUIRE(res);
  return {res->status, json::parse(res->body)};
}

std::string new_session() {
  const auto r = post("/api/session", json::object());
  REQUIRE(r.status == 201);
  return r.body.at("session_id").get<std::string>();
}

}  // namespace

TEST_CASE("schema and summary") {
  const auto schema = get("/api/schema");
  CHECK(schema.status == 200);
  CHECK(schema.body == to_json(fixture().service().schema()));

  const auto summary = get("/api/summary");
  CHECK(summary.status == 200);
  CHECK(summary.body.at("node_count") == fixture().service().summary().node_count);
  CHECK(summary.body.at("per_label").at("Patients") == 200);

  const auto id = new_session();
  CHECK(get("/api/summary?session=" + id).body == summary.body);
  const auto missing = get("/api/summary?session=nope");
  CHECK(missing.status == 404);
  CHECK(missing.body.at("error") == "SessionNotFound");
}

TEST_CASE("question, execute, feedback, then session state") {
  const auto id = new_session();
  const auto base = "/api/session/" + id;
  const auto q = post(base + "/question", {{"text", "How many patients are caucasian?"}});
  REQUIRE(q.status == 200);
  REQUIRE(q.body.at("candidates").size() == 1);
  const auto& c = q.body.at("candidates")[0];
  CHECK(c.at("kind") == "Navigational");
  CHECK(c.at("algorithm").is_null());
  CHECK(c.at("production") == "Aggregation");

  const auto turn = q.body.at("turn_id").get<std::int64_t>();
  const auto x = post(base + "/execute", {{"turn_id", turn}, {"candidate_id", c.at("id")}});
  REQUIRE(x.status == 200);
  CHECK(x.body.at("columns") == json::array({"count(n)"}));
  const auto want = oracle::csv_count(fixture().data().path / "patients.csv", "RACE", "white");
  CHECK(x.body.at("rows")[0][0] == want);
  CHECK(x.body.at("estimates").empty());

  const auto f = post(base + "/feedback", {{"turn_id", turn}, {"stars", 4}});
  REQUIRE(f.status == 200);
  CHECK(f.body.at("production") == "Aggregation");
  CHECK(f.body.at("count") == 1);
  CHECK(f.body.at("mean") == 4.0);
  CHECK(post(base + "/feedback", {{"turn_id", turn}, {"stars", 4}}).status == 400);

  const auto state = get(base);
  REQUIRE(state.status == 200);
  CHECK(state.body.at("session_id") == id);
  REQUIRE(state.body.at("turns").size() == 1);
  const auto& t = state.body.at("turns")[0];
  CHECK(t.at("chosen") == c.at("id"));
  CHECK(t.at("stars") == 4);
  CHECK(t.at("result").at("rows") == x.body.at("rows"));
}

TEST_CASE("unparseable questions return diagnostics with status 200") {
  const auto id = new_session();
  const auto q = post("/api/session/" + id + "/question", {{"text", "hello world"}});
  CHECK(q.status == 200);
  CHECK(q.body.at("candidates").empty());
  CHECK(q.body.at("diagnostics").at("kind") == "ParseError");
  CHECK(q.body.at("diagnostics").at("matched").contains("start"));
}

TEST_CASE("data-science candidate reports estimates, then a clashing view gives 409") {
  const auto id = new_session();
  const auto base = "/api/session/" + id;
  const auto q = post(base + "/question",
                      {{"text", "Find the most important Drugs prescribed for the PATIENT with a maximum of 25 "
                                "iterations and a damping factor of 0.60"}});
  REQUIRE(q.body.at("candidates").size() == 1);
  const auto& c = q.body.at("candidates")[0];
  CHECK(c.at("algorithm") == "PageRank");
  const auto x = post(base + "/execute", {{"turn_id", q.body.at("turn_id")}, {"candidate_id", c.at("id")}});
  REQUIRE(x.status == 200);
  REQUIRE(x.body.at("estimates").size() == 1);
  CHECK(x.body.at("estimates")[0].at("statement") == 1);
  CHECK(get(base).body.at("views") == json::array({"my_graph"}));

  const auto clash = post(base + "/execute",
                          {{"raw_script", "CALL gds.graph.create('my_graph', 'Patients', {PATIENT_HAS_ALLERGY: {orientation: 'NATURAL'}})"}});
  CHECK(clash.status == 409);
  CHECK(clash.body.at("cause") == "ViewExists");
  CHECK(clash.body.at("statement") == 0);
}

TEST_CASE("raw scripts and engine rejections") {
  const auto id = new_session();
  const auto base = "/api/session/" + id;
  const auto ok = post(base + "/execute", {{"raw_script", "MATCH (n:Patients) RETURN count(n)"}});
  CHECK(ok.status == 200);
  CHECK(ok.body.at("rows")[0][0] == 200);

  const auto merge = post(base + "/execute", {{"raw_script", "MERGE (n:Patients)"}});
  CHECK(merge.status == 422);
  CHECK(merge.body.at("error") == "ExecutionError");
  CHECK(merge.body.at("cause") == "CypherSubsetError");

  const auto missing_view = post(base + "/execute", {{"raw_script", "CALL gds.pageRank.stream('none') YIELD nodeId, score"}});
  CHECK(missing_view.status == 422);
  CHECK(missing_view.body.at("cause") == "ViewNotFound");
}

TEST_CASE("not-found and malformed requests") {
  const auto id = new_session();
  const auto base = "/api/session/" + id;
  CHECK(get("/api/session/nope").status == 404);
  CHECK(post("/api/session/nope/question", {{"text", "x"}}).status == 404);

  const auto unknown = post(base + "/execute", {{"turn_id", 77}, {"candidate_id", "0000000000000000"}});
  CHECK(unknown.status == 404);
  CHECK(unknown.body.at("error") == "CandidateNotFound");

  const auto no_text = post(base + "/question", json::object());
  CHECK(no_text.status == 400);
  CHECK(no_text.body.at("error") == "ValidationError");
  CHECK(post_text(base + "/question", "{not json").status == 400);
  CHECK(post_text(base + "/question", "[1,2]").status == 400);

  const auto q = post(base + "/question", {{"text", "How many patients are caucasian?"}});
  const auto zero = post(base + "/feedback", {{"turn_id", q.body.at("turn_id")}, {"stars", 0}});
  CHECK(zero.status == 400);
  CHECK(zero.body.at("error") == "ValidationError");
}

TEST_CASE("vocabulary endpoint") {
  const auto id = new_session();
  const auto base = "/api/session/" + id;
  const auto before = get(base).body.at("lexicon_version").get<std::int64_t>();
  const auto added = post(base + "/vocabulary", {{"property", "RACE"}, {"surface", "caucasian people"}, {"canonical", "white"}});
  REQUIRE(added.status == 200);
  CHECK(added.body.at("lexicon_version").get<std::int64_t>() > before);
  const auto again = post(base + "/vocabulary", {{"property", "RACE"}, {"surface", "caucasian people"}, {"canonical", "white"}});
  CHECK(again.body.at("lexicon_version") == added.body.at("lexicon_version"));
  const auto bad = post(base + "/vocabulary", {{"property", "EYECOLOR"}, {"surface", "blue"}, {"canonical", "blue"}});
  CHECK(bad.status == 400);
  CHECK(bad.body.at("error") == "VocabularyError");
}

TEST_CASE("status mapping for error classes") {
  CHECK(http_status(SessionNotFound("x")) == 404);
  CHECK(http_status(ValidationError("x")) == 400);
  CHECK(http_status(ExecutionError(2, "ViewExists", "x")) == 409);
  CHECK(http_status(ExecutionError(0, "ViewNotFound", "x")) == 422);
  CHECK(http_status(std::runtime_error("x")) == 500);
  const auto body = error_body(ExecutionError(2, "ViewNotFound", "gone"));
  CHECK(body.at("statement") == 2);
  CHECK(body.at("cause") == "ViewNotFound");
}

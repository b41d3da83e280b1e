#include <doctest.h>

#include <algorithm>
#include <random>

#include "nlds/cypher.hpp"
#include "nlds/errors.hpp"
#include "nlds/graph.hpp"
#include "nlds/lexicon.hpp"
#include "nlds/parser.hpp"
#include "nlds/querygen.hpp"
#include "oracles.hpp"
#include "scratch.hpp"

using namespace nlds;
using K = AlgorithmKind;

namespace {

struct Fixture {
  GraphSchema schema;
  Lexicon lexicon;
};

const Fixture& demo() {
  static const Fixture f = [] {
    test::ScratchDir dir;
    generate_synthetic(3, 40, dir.path);
    Fixture x;
    x.schema = extract_schema(load_csv_dataset(dir.path));
    x.lexicon = bind_vocabulary(x.schema);
    return x;
  }();
  return f;
}

std::vector<QueryCandidate> gen(const QuestionAST& ast, const std::set<std::string>& views = {}) {
  return generate(ast, demo().schema, demo().lexicon, views);
}

QueryCandidate make(const std::string& text, CandidateKind kind, std::optional<K> algorithm) {
  QueryCandidate c;
  c.script = {text};
  c.id = candidate_id(c.script);
  c.kind = kind;
  c.algorithm = algorithm;
  c.production = "Centrality";
  return c;
}

}  // namespace

TEST_CASE("candidate ids are FNV-1a of the rendered script") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  const std::vector<std::string> script = {"MATCH (n:Patients) RETURN n.BIRTHPLACE"};
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(script[0])));
  CHECK(candidate_id(script) == buf);
  CHECK(candidate_id({"A", "B"}) != candidate_id({"AB"}));
}

TEST_CASE("navigational templates") {
  auto one = [](const QuestionAST& ast) {
    const auto c = gen(ast);
    REQUIRE(c.size() == 1);
    CHECK(c[0].kind == CandidateKind::Navigational);
    CHECK_FALSE(c[0].algorithm.has_value());
    CHECK_FALSE(c[0].explanation.empty());
    REQUIRE(c[0].script.size() == 1);
    return c[0].script[0];
  };
  CHECK(one(ast::Aggregation{"Patients", {{"RACE", "white"}}}) == "MATCH (n:Patients {RACE:'white'}) RETURN count(n)");
  CHECK(one(ast::Projection{"Patients", "BIRTHPLACE"}) == "MATCH (n:Patients) RETURN n.BIRTHPLACE");
  CHECK(one(ast::Selection{"Medications", {{"DESCRIPTION", "Lisinopril 10 MG Oral Tablet"}}}) ==
        "MATCH (n:Medications {DESCRIPTION:'Lisinopril 10 MG Oral Tablet'}) RETURN n");
  CHECK(one(ast::SelectionProjection{"Encounters", "DESCRIPTION", "Medications", {{"DESCRIPTION", "X"}}}) ==
        "MATCH (n:Encounters)-[*]->(m:Medications {DESCRIPTION:'X'}) RETURN n.DESCRIPTION, m.DESCRIPTION");
}

TEST_CASE("string values with quotes are escaped") {
  const auto c = gen(ast::Selection{"Patients", {{"BIRTHPLACE", "O'Hare"}}});
  REQUIRE(c.size() == 1);
  CHECK_NOTHROW(cypher::parse_cypher(c[0].script[0]));
  const auto plan = cypher::parse_cypher(c[0].script[0]);
  const auto& scan = std::get<cypher::NodeScan>(plan.steps[0]);
  CHECK(std::get<std::string>(scan.node.properties[0].second) == "O'Hare");
}

TEST_CASE("most popular expands to degree and PageRank candidates") {
  const auto c = gen(ast::Centrality{"most popular", "Encounters", "ENCOUNTER_FOR_MEDICATION", {}, {}, {}});
  REQUIRE(c.size() == map_keyword_to_algorithms("most popular", demo().lexicon).size());
  std::set<K> algorithms;
  for (const auto& x : c) algorithms.insert(*x.algorithm);
  CHECK(algorithms == std::set<K>{K::DegreeCentrality, K::PageRank});
  const auto degree = std::find_if(c.begin(), c.end(), [](const auto& x) { return x.algorithm == K::DegreeCentrality; });
  REQUIRE(degree->script.size() == 1);
  CHECK(oracle::normalize_cypher(degree->script[0]) ==
        oracle::normalize_cypher("MATCH (n:Encounters)-[r:ENCOUNTER_FOR_MEDICATION]-() WITH n, count(*) AS degree "
                                 "RETURN id(n), degree ORDER BY (degree) DESC"));
}

TEST_CASE("PageRank script carries the question parameters") {
  const auto c = gen(ast::Centrality{"most important", "Medications", "PATIENT_HAS_MEDICATION", {}, 25, 0.60});
  REQUIRE(c.size() == 1);
  const auto& s = c[0].script;
  REQUIRE(s.size() == 3);
  CHECK(s[0] == "CALL gds.graph.create('my_graph', 'Medications', {PATIENT_HAS_MEDICATION: {orientation: 'NATURAL'}})");
  CHECK(s[1].find("maxIterations: 25") != std::string::npos);
  CHECK(s[1].find("dampingFactor: 0.60") != std::string::npos);
  CHECK(s[2].find("ORDER BY score DESC LIMIT 10") != std::string::npos);
  CHECK(s[2].find("asNode(nodeId).DESCRIPTION AS name") != std::string::npos);
}

TEST_CASE("PageRank defaults and view reuse") {
  const ast::Centrality q{"most important", "Medications", "PATIENT_HAS_MEDICATION", {}, {}, {}};
  const auto fresh = gen(q);
  REQUIRE(fresh[0].script.size() == 3);
  CHECK(fresh[0].script[1].find("maxIterations: 20") != std::string::npos);
  CHECK(fresh[0].script[1].find("dampingFactor: 0.85") != std::string::npos);
  const auto reused = gen(q, {"my_graph"});
  REQUIRE(reused[0].script.size() == 2);
  CHECK(reused[0].script[0].rfind("CALL gds.pageRank.write.estimate('my_graph'", 0) == 0);
  CHECK(reused[0].id != fresh[0].id);
}

TEST_CASE("named graph in the question is used as the view name") {
  const auto c = gen(ast::Centrality{"most important", "Medications", "PATIENT_HAS_MEDICATION", "g1", {}, {}});
  CHECK(c[0].script[0].find("'g1'") != std::string::npos);
}

TEST_CASE("community script uses an undirected view and size limit 5") {
  const auto c = gen(ast::Community{"subgroup", "Patients", {}, "PATIENT_HAS_CAREPLAN", 20});
  REQUIRE(c.size() == 1);
  CHECK(c[0].algorithm == K::LabelPropagation);
  REQUIRE(c[0].script.size() == 3);
  CHECK(c[0].script[0].find("orientation: 'UNDIRECTED'") != std::string::npos);
  CHECK(c[0].script[2].find("{maxIterations: 20}") != std::string::npos);
  CHECK(c[0].script[2].find("ORDER BY size DESC LIMIT 5") != std::string::npos);
  CHECK(gen(ast::Community{"subgroup", "Patients", {}, "PATIENT_HAS_CAREPLAN", {}}, {"my_graph"})[0].script.size() == 2);
}

TEST_CASE("view creation and memory estimation templates") {
  const auto v = gen(ast::ViewCreation{{}, "v1", "Patients", "PATIENT_HAS_ALLERGY", true});
  REQUIRE(v.size() == 1);
  REQUIRE(v[0].script.size() == 2);
  CHECK(v[0].script[0].find("'v1'") != std::string::npos);
  CHECK(v[0].script[0].find("NATURAL") != std::string::npos);
  CHECK(v[0].script[1].find("gds.graph.create.estimate") != std::string::npos);
  const auto u = gen(ast::ViewCreation{{}, {}, "Patients", "PATIENT_HAS_ALLERGY", false});
  CHECK(u[0].script[0].find("UNDIRECTED") != std::string::npos);

  const auto e = gen(ast::EstimateMemory{K::LabelPropagation, "v1"});
  REQUIRE(e.size() == 1);
  REQUIRE(e[0].script.size() == 1);
  CHECK(e[0].script[0].rfind("CALL gds.labelPropagation.write.estimate('v1'", 0) == 0);
}

TEST_CASE("relationship type not touching the label is a generation error") {
  CHECK_THROWS_AS(gen(ast::Centrality{"most important", "Allergies", "PATIENT_HAS_CAREPLAN", {}, {}, {}}), GenerationError);
  CHECK_THROWS_AS(gen(ast::Community{"classify", "Medications", {}, "PATIENT_HAS_ALLERGY", {}}), GenerationError);
}

TEST_CASE("keyword mapping") {
  CHECK(map_keyword_to_algorithms("most important", demo().lexicon) == std::set<K>{K::PageRank});
  CHECK(map_keyword_to_algorithms("communities", demo().lexicon) == std::set<K>{K::LabelPropagation});
  CHECK_THROWS_AS(map_keyword_to_algorithms("fastest", demo().lexicon), KeywordError);
}

TEST_CASE("ranking without feedback keeps generation order") {
  const std::vector<QueryCandidate> in = {make("B", CandidateKind::DataScience, K::PageRank),
                                          make("A", CandidateKind::DataScience, K::DegreeCentrality)};
  const auto out = rank_candidates(in, FeedbackStore{}, "Centrality");
  REQUIRE(out.size() == 2);
  CHECK(out[0].script == in[0].script);
  CHECK(out[0].score == kDefaultScore);
  CHECK(out[1].score == kDefaultScore);
}

TEST_CASE("ranking follows mean stars") {
  const std::vector<QueryCandidate> in = {make("A", CandidateKind::DataScience, K::DegreeCentrality),
                                          make("B", CandidateKind::DataScience, K::PageRank),
                                          make("C", CandidateKind::Navigational, std::nullopt)};
  FeedbackStore up;
  up.set({"Centrality", "PageRank"}, {10, 2});
  CHECK(rank_candidates(in, up, "Centrality")[0].algorithm == K::PageRank);

  FeedbackStore down;
  down.set({"Centrality", "DegreeCentrality"}, {2, 2});
  const auto out = rank_candidates(in, down, "Centrality");
  CHECK(out.back().algorithm == K::DegreeCentrality);
  CHECK(out.back().score == doctest::Approx(1.0));
  // Feedback for another production is ignored.
  CHECK(rank_candidates(in, down, "Community")[0].algorithm == K::DegreeCentrality);
}

TEST_CASE("ranking is a permutation") {
  std::mt19937_64 rng(9);
  for (int round = 0; round < 50; ++round) {
    std::vector<QueryCandidate> in;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      const auto a = static_cast<K>(rng() % 3);
      in.push_back(make("S" + std::to_string(i), CandidateKind::DataScience, a));
    }
    FeedbackStore fb;
    for (int i = 0; i < 3; ++i) {
      fb.record("Centrality", std::string(to_string(static_cast<K>(rng() % 3))), 1 + static_cast<int>(rng() % 5));
    }
    auto out = rank_candidates(in, fb, "Centrality");
    REQUIRE(out.size() == in.size());
    auto ids = [](std::vector<QueryCandidate> v) {
      std::vector<std::string> r;
      for (const auto& c : v) r.push_back(c.id);
      std::sort(r.begin(), r.end());
      return r;
    };
    CHECK(ids(out) == ids(in));
    CHECK(std::is_sorted(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.score > b.score; }));
  }
}

TEST_CASE("feedback store validates stars and averages") {
  FeedbackStore fb;
  CHECK_THROWS_AS(fb.record("Centrality", "PageRank", 0), ValidationError);
  CHECK_THROWS_AS(fb.record("Centrality", "PageRank", 6), ValidationError);
  fb.record("Centrality", "PageRank", 4);
  fb.record("Centrality", "PageRank", 2);
  const auto t = fb.find("Centrality", "PageRank");
  REQUIRE(t.has_value());
  CHECK(t->count == 2);
  CHECK(t->mean() == doctest::Approx(3.0));
}

TEST_CASE("generation is deterministic and closed under the Cypher parser") {
  const auto sentences = grammar_sample(77, 300, demo().schema);
  for (const auto& s : sentences) {
    for (const auto& ast : parse_question(s, demo().lexicon)) {
      const auto a = gen(ast);
      CHECK(a == gen(ast));
      for (const auto& c : a) {
        CHECK(c.id == candidate_id(c.script));
        for (const auto& stmt : c.script) {
          const auto plan = cypher::parse_cypher(stmt);
          CHECK_MESSAGE(cypher::parse_cypher(cypher::render(plan)) == plan, stmt);
        }
        if ((c.production == "Centrality" || c.production == "Community") && c.algorithm != K::DegreeCentrality) {
          CHECK(c.script.size() == (c.script[0].find("gds.graph.create(") != std::string::npos ? 3u : 2u));
        }
      }
    }
  }
}

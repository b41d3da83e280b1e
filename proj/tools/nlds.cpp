// nlds: command-line front end.
//
//   nlds gen-data --seed 42 --patients 500 --out data/
//   nlds translate "How many patients are caucasian?" --data data/ --execute
//   nlds serve --data data/ --port 8080
//   nlds replay sessions/<id>.jsonl --data data/

#include <csignal>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "nlds/engine.hpp"
#include "nlds/http.hpp"
#include "nlds/parser.hpp"
#include "nlds/querygen.hpp"
#include "nlds/session.hpp"

namespace {

constexpr int kParseFailure = 2;

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

std::vector<nlds::ValueSynonym> load_synonyms(const std::string& path) {
  if (path.empty() || !std::filesystem::exists(path)) return {};
  return nlds::load_synonyms_csv(path);
}

int gen_data(std::uint64_t seed, std::size_t patients, const std::string& out) {
  const auto manifest = nlds::generate_synthetic(seed, patients, out);
  std::size_t total = 0;
  for (const auto& [label, rows] : manifest.row_counts) {
    std::cout << label << '\t' << rows << '\n';
    total += rows;
  }
  std::cout << "wrote " << total << " rows to " << manifest.directory.string() << '\n';
  return 0;
}

int translate(const std::string& question, const std::string& data, const std::string& synonyms_path,
              bool execute, bool as_json) {
  const auto graph = nlds::load_csv_dataset(data);
  const auto schema = nlds::extract_schema(graph);
  const auto lexicon = nlds::bind_vocabulary(schema, load_synonyms(synonyms_path));

  std::vector<nlds::QuestionAST> asts;
  try {
    asts = nlds::parse_question(question, lexicon);
  } catch (const nlds::ParseError& e) {
    if (as_json) {
      std::cout << nlds::to_json(nlds::Diagnostics{"ParseError", e.what(), e.matched(), e.productions()}).dump(2)
                << '\n';
    } else {
      std::cerr << "parse error: " << e.what() << '\n';
      std::cerr << "  matched characters " << e.matched().start << ".." << e.matched().end << '\n';
      for (const auto& p : e.productions()) std::cerr << "  closest production: " << p << '\n';
    }
    return kParseFailure;
  }

  nlohmann::json out = nlohmann::json::array();
  for (const auto& ast : asts) {
    for (const auto& c : nlds::generate(ast, schema, lexicon, {})) {
      auto j = nlds::to_json(c);
      if (!as_json) {
        std::cout << "-- " << c.id << "  " << c.production << " / " << c.feedback_kind() << '\n';
        std::cout << "-- " << c.explanation << '\n';
        std::cout << c.rendered() << ";\n";
      }
      if (execute) {
        nlds::ViewCatalog views;  // each candidate runs against a clean catalog
        try {
          const auto r = nlds::execute_script(c.script, graph, views);
          j["result"] = nlds::to_json(nlds::ExecuteResponse{r.table, r.estimates});
          if (!as_json) {
            for (const auto& e : r.estimates) {
              std::cout << "-- estimate (statement " << e.statement_index << "): " << e.estimate.required_memory
                        << '\n';
            }
            std::cout << r.table.to_csv();
          }
        } catch (const nlds::ExecutionError& e) {
          j["error"] = nlds::error_body(e);
          if (!as_json) std::cout << "-- execution failed: " << e.what() << '\n';
        }
      }
      if (!as_json) std::cout << '\n';
      out.push_back(std::move(j));
    }
  }
  if (as_json) std::cout << out.dump(2) << '\n';
  return 0;
}

int serve(const std::string& data, const std::string& host, int port, const std::string& log_dir,
          const std::string& synonyms_path) {
  auto graph = std::make_shared<const nlds::PropertyGraph>(nlds::load_csv_dataset(data));
  nlds::ServiceOptions options;
  options.log_dir = log_dir;
  options.synonyms_csv = synonyms_path;
  nlds::SessionService service(graph, options);

  httplib::Server server;
  nlds::register_routes(server, service);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const auto s = service.summary();
  std::cerr << "loaded " << s.node_count << " nodes and " << s.relationship_count << " relationships\n";
  std::cerr << "listening on http://" << host << ':' << port << '\n';
  if (!server.listen(host, port)) {
    std::cerr << "cannot listen on " << host << ':' << port << '\n';
    return 1;
  }
  return 0;
}

int replay(const std::string& log, const std::string& data, const std::string& synonyms_path) {
  auto graph = std::make_shared<const nlds::PropertyGraph>(nlds::load_csv_dataset(data));
  nlds::ServiceOptions options;
  options.synonyms_csv = synonyms_path;
  nlds::SessionService service(graph, options);
  const auto report = nlds::replay_log(log, service);
  for (const auto& m : report.mismatches) std::cout << "line " << m.line << ": " << m.what << '\n';
  std::cout << report.events << " events replayed, " << report.mismatches.size() << " mismatches\n";
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Translate data-science questions into Cypher and run them on a patient graph"};
  app.require_subcommand(1);

  std::string data;
  std::string synonyms;

  auto* gen = app.add_subcommand("gen-data", "Write a seeded synthetic patient dataset");
  std::uint64_t seed = 42;
  std::size_t patients = 100;
  std::string out;
  gen->add_option("--seed", seed, "Generator seed")->required();
  gen->add_option("--patients", patients, "Number of patients")->required()->check(CLI::PositiveNumber);
  gen->add_option("--out", out, "Output directory")->required();

  auto* tr = app.add_subcommand("translate", "Print the Cypher candidates for a question");
  std::string question;
  bool execute = false;
  bool as_json = false;
  tr->add_option("question", question, "Question text")->required();
  tr->add_option("--data", data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  tr->add_option("--synonyms", synonyms, "Synonyms CSV (property,surface,canonical)");
  tr->add_flag("--execute", execute, "Run every candidate and print its result");
  tr->add_flag("--json", as_json, "Print JSON instead of text");

  auto* sv = app.add_subcommand("serve", "Run the HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string log_dir = "sessions";
  sv->add_option("--data", data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  sv->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535));
  sv->add_option("--host", host, "Bind address");
  sv->add_option("--log-dir", log_dir, "Directory for session logs");
  sv->add_option("--synonyms", synonyms, "Synonyms CSV, created on first vocabulary extension");

  auto* rp = app.add_subcommand("replay", "Re-run a session log and compare results");
  std::string log;
  rp->add_option("log", log, "Session log (.jsonl)")->required()->check(CLI::ExistingFile);
  rp->add_option("--data", data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  rp->add_option("--synonyms", synonyms, "Synonyms CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return gen_data(seed, patients, out);
    if (*tr) return translate(question, data, synonyms, execute, as_json);
    if (*sv) return serve(data, host, port, log_dir, synonyms.empty() ? data + "/synonyms.csv" : synonyms);
    if (*rp) return replay(log, data, synonyms);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

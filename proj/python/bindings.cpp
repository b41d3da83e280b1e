#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nlds/engine.hpp"
#include "nlds/parser.hpp"
#include "nlds/querygen.hpp"
#include "nlds/session.hpp"

namespace py = pybind11;
using namespace nlds;

namespace {

py::object to_py(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null:
      return py::none();
    case nlohmann::json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case nlohmann::json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case nlohmann::json::value_t::number_float:
      return py::float_(j.get<double>());
    case nlohmann::json::value_t::string:
      return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(to_py(item));
      return out;
    }
    case nlohmann::json::value_t::object: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_py(v);
      return out;
    }
    default:
      return py::none();
  }
}

/// One loaded dataset with its own view catalog.
class Dataset {
 public:
  explicit Dataset(const std::filesystem::path& directory, const std::vector<ValueSynonym>& synonyms)
      : graph_(std::make_shared<const PropertyGraph>(load_csv_dataset(directory))),
        schema_(extract_schema(*graph_)),
        lexicon_(bind_vocabulary(schema_, synonyms)) {}

  py::object summary() const { return to_py(to_json(graph_summary(*graph_))); }
  py::object schema() const { return to_py(to_json(schema_)); }

  py::object translate(const std::string& question) const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& ast : parse_question(question, lexicon_)) {
      for (const auto& c : generate(ast, schema_, lexicon_, views_.names())) out.push_back(to_json(c));
    }
    return to_py(out);
  }

  py::object execute(const std::string& script) {
    const auto r = execute_script(std::string_view(script), *graph_, views_, ExecuteOptions{true});
    return to_py(to_json(ExecuteResponse{r.table, r.estimates}));
  }

  py::object run_pagerank(const std::string& label, const std::string& rel_type, std::int64_t max_iterations,
                          double damping, const std::string& orientation) const {
    const auto view = build_view("_", label, rel_type, orientation_from_string(orientation), *graph_);
    const auto r = pagerank(view, max_iterations, damping);
    py::dict scores;
    for (const auto& s : r.scores) scores[py::int_(s.node)] = s.score;
    py::dict out;
    out["scores"] = scores;
    out["iterations"] = r.iterations;
    out["converged"] = r.converged;
    return out;
  }

  py::object run_label_propagation(const std::string& label, const std::string& rel_type,
                                   std::int64_t max_iterations) const {
    const auto view = build_view("_", label, rel_type, Orientation::Undirected, *graph_);
    const auto r = label_propagation(view, max_iterations);
    py::dict communities;
    for (const auto& [node, community] : r.assignments) communities[py::int_(node)] = community;
    py::dict out;
    out["communities"] = communities;
    out["iterations"] = r.iterations;
    out["converged"] = r.converged;
    out["community_count"] = r.community_count();
    return out;
  }

  py::object memory_estimate(const std::string& label, const std::string& rel_type,
                             const std::string& orientation) const {
    const auto view = build_view("_", label, rel_type, orientation_from_string(orientation), *graph_);
    return to_py(estimate_to_json(estimate_memory(view, AlgorithmKind::PageRank)));
  }

  std::set<std::string> view_names() const { return views_.names(); }

 private:
  std::shared_ptr<const PropertyGraph> graph_;
  GraphSchema schema_;
  Lexicon lexicon_;
  ViewCatalog views_;
};

class Service {
 public:
  Service(const std::filesystem::path& data, const std::filesystem::path& log_dir,
          const std::filesystem::path& synonyms_csv) {
    ServiceOptions options;
    options.log_dir = log_dir;
    options.synonyms_csv = synonyms_csv;
    service_ = std::make_unique<SessionService>(std::make_shared<const PropertyGraph>(load_csv_dataset(data)),
                                                options);
  }

  std::string create_session() { return service_->create_session(); }
  py::object ask(const std::string& id, const std::string& text) {
    return to_py(to_json(service_->post_question(id, text)));
  }
  py::object execute(const std::string& id, std::int64_t turn, const std::string& candidate) {
    return to_py(to_json(service_->execute_candidate(id, turn, candidate)));
  }
  py::object execute_raw(const std::string& id, const std::string& script, std::optional<std::int64_t> turn) {
    return to_py(to_json(service_->execute_raw(id, script, turn)));
  }
  py::object feedback(const std::string& id, std::int64_t turn, int stars) {
    return to_py(to_json(service_->record_feedback(id, turn, stars)));
  }
  std::int64_t add_synonym(const std::string& id, const std::string& property, const std::string& surface,
                           const std::string& canonical) {
    return service_->add_synonym(id, {property, surface, canonical});
  }
  std::filesystem::path log_path(const std::string& id) const { return service_->log_path(id); }
  py::object summary() const { return to_py(to_json(service_->summary())); }

  py::object replay(const std::filesystem::path& log) {
    const auto report = replay_log(log, *service_);
    py::list mismatches;
    for (const auto& m : report.mismatches) mismatches.append(py::make_tuple(m.line, m.what));
    py::dict out;
    out["events"] = report.events;
    out["mismatches"] = mismatches;
    return out;
  }

 private:
  std::unique_ptr<SessionService> service_;
};

std::vector<ValueSynonym> synonyms_from(const std::optional<std::filesystem::path>& path) {
  if (!path || !std::filesystem::exists(*path)) return {};
  return load_synonyms_csv(*path);
}

}  // namespace

PYBIND11_MODULE(_nlds, m) {
  m.doc() = "Natural-language questions over a patient property graph";

  static py::exception<Error> error(m, "NldsError");
  static py::exception<ParseError> parse_error(m, "ParseError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      py::object type = parse_error;
      py::object exc = type(e.what());
      exc.attr("productions") = e.productions();
      exc.attr("matched") = py::make_tuple(e.matched().start, e.matched().end);
      PyErr_SetObject(parse_error.ptr(), exc.ptr());
    } catch (const ExecutionError& e) {
      py::object type = error;
      py::object exc = type(e.what());
      exc.attr("kind") = e.kind();
      exc.attr("statement") = e.statement_index();
      PyErr_SetObject(error.ptr(), exc.ptr());
    } catch (const Error& e) {
      py::object type = error;
      py::object exc = type(e.what());
      exc.attr("kind") = error_kind(e);
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def(
      "generate_data",
      [](std::uint64_t seed, std::size_t patients, const std::filesystem::path& out) {
        return generate_synthetic(seed, patients, out).row_counts;
      },
      py::arg("seed"), py::arg("patients"), py::arg("out"),
      "Write a synthetic dataset and return rows written per label.");

  m.def("grammar_sample", [](std::uint64_t seed, std::size_t n, const std::string& data) {
    return grammar_sample(seed, n, extract_schema(load_csv_dataset(data)));
  }, py::arg("seed"), py::arg("n"), py::arg("data"));

  m.def("candidate_id", &candidate_id, py::arg("script"));

  m.def(
      "memory_estimate",
      [](std::int64_t nodes, std::int64_t relationships) {
        return to_py(estimate_to_json(estimate_memory(nodes, relationships)));
      },
      py::arg("nodes"), py::arg("relationships"));

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](const std::filesystem::path& directory, std::optional<std::filesystem::path> synonyms) {
             return std::make_unique<Dataset>(directory, synonyms_from(synonyms));
           }),
           py::arg("directory"), py::arg("synonyms") = py::none())
      .def("summary", &Dataset::summary)
      .def("schema", &Dataset::schema)
      .def("translate", &Dataset::translate, py::arg("question"),
           "Candidate Cypher scripts for a question; raises ParseError when no production matches.")
      .def("execute", &Dataset::execute, py::arg("script"))
      .def("pagerank", &Dataset::run_pagerank, py::arg("label"), py::arg("rel_type"),
           py::arg("max_iterations") = 20, py::arg("damping") = 0.85, py::arg("orientation") = "NATURAL")
      .def("label_propagation", &Dataset::run_label_propagation, py::arg("label"), py::arg("rel_type"),
           py::arg("max_iterations") = 10)
      .def("memory_estimate", &Dataset::memory_estimate, py::arg("label"), py::arg("rel_type"),
           py::arg("orientation") = "NATURAL")
      .def("view_names", &Dataset::view_names);

  py::class_<Service>(m, "Service")
      .def(py::init([](const std::filesystem::path& data, std::optional<std::filesystem::path> log_dir,
                       std::optional<std::filesystem::path> synonyms) {
             return std::make_unique<Service>(data, log_dir.value_or(""), synonyms.value_or(""));
           }),
           py::arg("data"), py::arg("log_dir") = py::none(), py::arg("synonyms") = py::none())
      .def("create_session", &Service::create_session)
      .def("ask", &Service::ask, py::arg("session"), py::arg("text"))
      .def("execute", &Service::execute, py::arg("session"), py::arg("turn_id"), py::arg("candidate_id"))
      .def("execute_raw", &Service::execute_raw, py::arg("session"), py::arg("script"),
           py::arg("turn_id") = py::none())
      .def("feedback", &Service::feedback, py::arg("session"), py::arg("turn_id"), py::arg("stars"))
      .def("add_synonym", &Service::add_synonym, py::arg("session"), py::arg("property"), py::arg("surface"),
           py::arg("canonical"))
      .def("log_path", &Service::log_path, py::arg("session"))
      .def("summary", &Service::summary)
      .def("replay", &Service::replay, py::arg("log"));
}

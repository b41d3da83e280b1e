#include <random>

#include "nlds/errors.hpp"
#include "nlds/parser.hpp"

namespace nlds {

namespace {

class Sampler {
 public:
  Sampler(std::uint64_t seed, const GraphSchema& schema) : rng_(seed), schema_(schema) {
    for (const auto& [label, props] : schema.properties) {
      if (!props.empty()) labeled_.push_back(label);
    }
    for (const auto& [type, ends] : schema.relationship_types) types_.push_back(type);
  }

  std::string sentence() {
    // Productions that need relationship types are skipped on schemas without any.
    const std::size_t count = types_.empty() ? 4 : 8;
    switch (below(count)) {
      case 0:
        return selection();
      case 1:
        return projection();
      case 2:
        return selection_projection();
      case 3:
        return aggregation();
      case 4:
        return view_creation();
      case 5:
        return estimate_memory();
      case 6:
        return centrality();
      default:
        return community();
    }
  }

 private:
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  bool coin() { return below(2) == 0; }

  template <typename C>
  const auto& pick(const C& c) {
    auto it = c.begin();
    std::advance(it, static_cast<std::ptrdiff_t>(below(c.size())));
    return *it;
  }

  static std::string lower(const std::string& s) { return normalize_phrase(s); }

  std::string surface(const std::string& name) { return coin() ? name : lower(name); }

  std::string label_with_props() { return pick(labeled_); }
  std::string property_of(const std::string& label) { return pick(schema_.properties.at(label)); }

  std::string value() {
    static const std::vector<std::string> pool = {
        "Hypertension", "white", "Lisinopril 10 MG Oral Tablet", "Boston Massachusetts US", "M",
        "Encounter for check up", "asian", "Amlodipine 5 MG Oral Tablet"};
    const auto& v = pick(pool);
    return coin() ? "'" + v + "'" : "\"" + v + "\"";
  }

  std::string view_name() {
    static const std::vector<std::string> names = {"my_graph", "patient_view", "g1", "care_view"};
    return pick(names);
  }

  std::string condition(const std::string& label) {
    return "the " + surface(property_of(label)) + " is " + value();
  }

  std::string suffix() {
    static const std::vector<std::string> endings = {"", " in the study", " in the Synthea study"};
    return pick(endings) + (coin() ? "?" : ".");
  }

  std::string selection() {
    static const std::vector<std::string> verbs = {"Find", "Show", "List"};
    static const std::vector<std::string> links = {"for which", "where", "whose"};
    const auto label = label_with_props();
    std::string s = pick(verbs) + " the " + surface(label) + " " + pick(links) + " " + condition(label);
    if (coin()) s += " and " + condition(label);
    return s + suffix();
  }

  std::string projection() {
    const auto label = label_with_props();
    const auto prop = surface(property_of(label));
    if (coin()) return "Which is the " + prop + " of the " + surface(label) + suffix();
    return "Find the " + prop + " of the " + surface(label) + suffix();
  }

  std::string selection_projection() {
    const auto source = label_with_props();
    const auto target = label_with_props();
    std::string s = "Find the " + surface(source) + " " + surface(property_of(source)) +
                    (coin() ? " node" : "") + " where the " + surface(property_of(target)) +
                    " of the " + surface(target) + " is " + value();
    return s + suffix();
  }

  std::string aggregation() {
    const auto label = label_with_props();
    switch (below(3)) {
      case 0:
        return "How many " + surface(label) + " are there" + suffix();
      case 1:
        return "How many " + surface(label) + " where " + condition(label) + suffix();
      default: {
        static const std::vector<std::pair<std::string, std::string>> adjectives = {
            {"RACE", "caucasian"}, {"RACE", "black"}, {"RACE", "asian"},
            {"GENDER", "female"},  {"GENDER", "male"}};
        for (std::size_t attempt = 0; attempt < adjectives.size(); ++attempt) {
          const auto& [prop, adj] = pick(adjectives);
          if (schema_.has_property(label, prop)) return "How many " + surface(label) + " are " + adj + "?";
        }
        return "How many " + surface(label) + "?";
      }
    }
  }

  std::string view_creation() {
    const auto& type = pick(types_);
    const auto& ends = schema_.relationship_types.at(type);
    const auto label = coin() ? ends.first : ends.second;
    std::string s = "Create and estimate memory for the graph view";
    if (coin()) s += " synthea_graph";
    if (coin()) s += " named as " + view_name();
    s += " with the node " + surface(label) + " and the relationship " + surface(type);
    if (coin()) s += " oriented";
    return s;
  }

  std::string estimate_memory() {
    static const std::vector<std::string> algorithms = {"PageRank", "page rank", "Label Propagation"};
    return "Estimate the required memory for applying " + pick(algorithms) + " on the graph view " +
           view_name();
  }

  std::string iterations() {
    const auto n = std::to_string(1 + below(100));
    switch (below(3)) {
      case 0:
        return " with " + n + " maximum of iterations";
      case 1:
        return " with a maximum of " + n + " iterations";
      default:
        return " with max iterations " + n;
    }
  }

  std::string centrality() {
    static const std::vector<std::string> keywords = {"most important", "most popular", "most influential"};
    const auto& type = pick(types_);
    const auto& ends = schema_.relationship_types.at(type);
    const auto label = coin() ? ends.first : ends.second;
    std::string s = "Find the " + pick(keywords) + " " + surface(label) + " with " + surface(type);
    if (coin()) s += " in the graph " + view_name();
    if (coin()) s += iterations();
    if (coin()) s += " and with a damping factor " + format_double(static_cast<double>(5 + below(91)) / 100.0, 2);
    return s;
  }

  std::string community() {
    const auto& type = pick(types_);
    const auto& ends = schema_.relationship_types.at(type);
    const auto label = coin() ? ends.first : ends.second;
    switch (below(3)) {
      case 0:
        return "Classify the " + surface(label) + " within the view " + view_name() + " with relation " +
               surface(type) + iterations();
      case 1: {
        static const std::vector<std::string> words = {"groups", "communities"};
        return "Find " + pick(words) + " of " + surface(label) + " with " + surface(type);
      }
      default:
        return "Get the subgroup of " + surface(label) + " who have " + surface(type) +
               " in the graph" + iterations();
    }
  }

  std::mt19937_64 rng_;
  const GraphSchema& schema_;
  std::vector<std::string> labeled_;
  std::vector<std::string> types_;
};

}  // namespace

std::vector<std::string> grammar_sample(std::uint64_t seed, std::size_t n, const GraphSchema& schema) {
  if (n < 1) throw ValidationError("grammar_sample needs n >= 1");
  bool any_property = false;
  for (const auto& [label, props] : schema.properties) any_property |= !props.empty();
  if (!any_property) throw ValidationError("grammar_sample needs a schema with properties");
  Sampler sampler(seed, schema);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sampler.sentence());
  return out;
}

}  // namespace nlds

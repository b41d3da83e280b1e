#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nlds/value.hpp"

namespace nlds {

using NodeId = std::int64_t;
using RelId = std::int64_t;

struct Node {
  NodeId id = 0;
  std::string label;
  PropertyMap properties;
};

struct Relationship {
  RelId id = 0;
  std::string type;
  NodeId source = 0;
  NodeId target = 0;
  PropertyMap properties;
};

/// In-memory labeled property graph. Ids are dense and assigned in insertion
/// order; each node carries exactly one label. Built once, then shared
/// read-only.
class PropertyGraph {
 public:
  NodeId add_node(std::string label, PropertyMap properties = {});
  /// Throws std::out_of_range if either endpoint does not exist.
  RelId add_relationship(std::string type, NodeId source, NodeId target,
                         PropertyMap properties = {});

  [[nodiscard]] const std::vector<Node>& nodes() const { return nodes_; }
  [[nodiscard]] const std::vector<Relationship>& relationships() const { return rels_; }
  [[nodiscard]] const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  [[nodiscard]] const Relationship& relationship(RelId id) const {
    return rels_.at(static_cast<std::size_t>(id));
  }

  /// Node ids carrying `label`, ascending. Empty for unknown labels.
  [[nodiscard]] std::span<const NodeId> nodes_with_label(const std::string& label) const;
  [[nodiscard]] std::span<const RelId> outgoing(NodeId id) const;
  [[nodiscard]] std::span<const RelId> incoming(NodeId id) const;

  [[nodiscard]] bool empty() const { return nodes_.empty(); }

 private:
  std::vector<Node> nodes_;
  std::vector<Relationship> rels_;
  std::map<std::string, std::vector<NodeId>> by_label_;
  std::vector<std::vector<RelId>> out_;
  std::vector<std::vector<RelId>> in_;
};

/// Edge direction of a graph view.
enum class Orientation { Natural, Undirected };

std::string_view to_string(Orientation o);
/// Accepts NATURAL / UNDIRECTED in any case; throws ViewDefinitionError otherwise.
Orientation orientation_from_string(std::string_view text);

/// Vocabulary source for the NL lexicon.
struct GraphSchema {
  std::set<std::string> labels;
  /// type -> (source label, target label)
  std::map<std::string, std::pair<std::string, std::string>> relationship_types;
  std::map<std::string, std::set<std::string>> properties;

  bool operator==(const GraphSchema&) const = default;

  [[nodiscard]] bool has_property(const std::string& label, const std::string& property) const;
  /// Labels owning `property`, ascending.
  [[nodiscard]] std::vector<std::string> labels_with_property(const std::string& property) const;
  /// Relationship types with `a` and `b` as endpoints in either direction, ascending.
  [[nodiscard]] std::vector<std::string> types_connecting(const std::string& a,
                                                         const std::string& b) const;
  /// True if `type` has `label` as source or target.
  [[nodiscard]] bool touches(const std::string& type, const std::string& label) const;
  [[nodiscard]] std::set<std::string> all_properties() const;
};

/// Throws SchemaConflict if a relationship type is observed between two
/// different label pairs.
GraphSchema extract_schema(const PropertyGraph& graph);

struct GraphSummary {
  std::size_t node_count = 0;
  std::size_t relationship_count = 0;
  std::map<std::string, std::size_t> per_label;
  std::map<std::string, std::size_t> per_type;
  bool operator==(const GraphSummary&) const = default;
};

GraphSummary graph_summary(const PropertyGraph& graph);

// ---------------------------------------------------------------------------
// Dataset files

/// One CSV entity file of the patient dataset.
struct EntityFile {
  std::string file;   // e.g. "medications.csv"
  std::string label;  // e.g. "Medications"
  std::string relationship;  // PATIENT_HAS_<ENTITY>, empty for patients
  std::vector<std::string> columns;
};

/// The eight entity files in load order.
const std::vector<EntityFile>& dataset_layout();

struct DatasetManifest {
  std::filesystem::path directory;
  std::map<std::string, std::string> files;     // label -> file name
  std::map<std::string, std::size_t> row_counts; // label -> data rows
  std::optional<std::uint64_t> seed;
};

/// Loads whichever entity files exist under `directory`. Every node gets all
/// non-foreign-key columns as string properties; empty cells are omitted.
/// Throws IngestError on a missing column or dangling foreign key.
PropertyGraph load_csv_dataset(const std::filesystem::path& directory);

/// Writes a deterministic synthetic patient dataset. Throws IoError if the
/// directory cannot be created or written.
DatasetManifest generate_synthetic(std::uint64_t seed, std::size_t n_patients,
                                   const std::filesystem::path& directory);

/// Medication descriptions the generator draws from.
const std::vector<std::string>& synthetic_medications();

}  // namespace nlds

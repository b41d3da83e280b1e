#include <algorithm>
#include <cctype>
#include <mutex>

#include "nlds/engine.hpp"
#include "nlds/errors.hpp"

namespace nlds {

std::string_view to_string(Orientation o) { return o == Orientation::Natural ? "NATURAL" : "UNDIRECTED"; }

Orientation orientation_from_string(std::string_view text) {
  std::string up(text);
  for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "NATURAL") return Orientation::Natural;
  if (up == "UNDIRECTED") return Orientation::Undirected;
  throw ViewDefinitionError("unknown orientation '" + std::string(text) + "'");
}

std::size_t GraphView::relationship_count() const {
  std::size_t total = 0;
  for (const auto& a : adjacency) total += a.size();
  return total;
}

GraphView build_view(std::string name, const std::string& node_label, const std::string& rel_type,
                     Orientation orientation, const PropertyGraph& graph) {
  const auto members = graph.nodes_with_label(node_label);
  if (members.empty()) throw ViewDefinitionError("unknown node label '" + node_label + "'");
  const auto& rels = graph.relationships();
  if (std::none_of(rels.begin(), rels.end(), [&](const Relationship& r) { return r.type == rel_type; })) {
    throw ViewDefinitionError("unknown relationship type '" + rel_type + "'");
  }

  GraphView view;
  view.name = std::move(name);
  view.node_label = node_label;
  view.rel_type = rel_type;
  view.orientation = orientation;
  view.nodes.assign(members.begin(), members.end());
  view.adjacency.resize(view.nodes.size());
  for (std::size_t i = 0; i < view.nodes.size(); ++i) view.index.emplace(view.nodes[i], i);

  for (std::size_t i = 0; i < view.nodes.size(); ++i) {
    for (RelId rid : graph.outgoing(view.nodes[i])) {
      const auto& r = graph.relationship(rid);
      if (r.type != rel_type) continue;
      auto target = view.index.find(r.target);
      if (target == view.index.end()) continue;
      view.adjacency[i].push_back(target->second);
      if (orientation == Orientation::Undirected) view.adjacency[target->second].push_back(i);
    }
  }
  return view;
}

std::shared_ptr<const GraphView> ViewCatalog::create(GraphView view) {
  std::unique_lock lock(mutex_);
  if (views_.count(view.name)) throw ViewExists("graph view '" + view.name + "' already exists");
  auto ptr = std::make_shared<const GraphView>(std::move(view));
  views_.emplace(ptr->name, ptr);
  return ptr;
}

std::shared_ptr<const GraphView> ViewCatalog::find(const std::string& name) const {
  std::shared_lock lock(mutex_);
  auto it = views_.find(name);
  if (it == views_.end()) throw ViewNotFound("graph view '" + name + "' does not exist");
  return it->second;
}

bool ViewCatalog::contains(const std::string& name) const {
  std::shared_lock lock(mutex_);
  return views_.count(name) > 0;
}

std::set<std::string> ViewCatalog::names() const {
  std::shared_lock lock(mutex_);
  std::set<std::string> out;
  for (const auto& [name, view] : views_) out.insert(name);
  return out;
}

bool ViewCatalog::drop(const std::string& name) {
  std::unique_lock lock(mutex_);
  return views_.erase(name) > 0;
}

MemoryEstimate estimate_memory(std::int64_t node_count, std::int64_t relationship_count) {
  MemoryEstimate e;
  e.node_count = node_count;
  e.relationship_count = relationship_count;
  e.bytes_min = 40 * node_count + 24 * relationship_count + 8 * node_count;
  e.bytes_max = 2 * e.bytes_min;
  e.required_memory =
      "[" + std::to_string(e.bytes_min) + " Bytes ... " + std::to_string(e.bytes_max) + " Bytes]";
  return e;
}

MemoryEstimate estimate_memory(const GraphView& view, AlgorithmKind /*algorithm*/) {
  return estimate_memory(static_cast<std::int64_t>(view.node_count()),
                         static_cast<std::int64_t>(view.relationship_count()));
}

nlohmann::json estimate_to_json(const MemoryEstimate& e) {
  return {{"nodeCount", e.node_count},
          {"relationshipCount", e.relationship_count},
          {"bytesMin", e.bytes_min},
          {"bytesMax", e.bytes_max},
          {"requiredMemory", e.required_memory}};
}

}  // namespace nlds

#include "nlds/graph.hpp"

#include <stdexcept>

#include "nlds/errors.hpp"

namespace nlds {

NodeId PropertyGraph::add_node(std::string label, PropertyMap properties) {
  const auto id = static_cast<NodeId>(nodes_.size());
  by_label_[label].push_back(id);
  nodes_.push_back(Node{id, std::move(label), std::move(properties)});
  out_.emplace_back();
  in_.emplace_back();
  return id;
}

RelId PropertyGraph::add_relationship(std::string type, NodeId source, NodeId target,
                                      PropertyMap properties) {
  const auto n = static_cast<NodeId>(nodes_.size());
  if (source < 0 || source >= n || target < 0 || target >= n) {
    throw std::out_of_range("relationship endpoint does not exist");
  }
  const auto id = static_cast<RelId>(rels_.size());
  rels_.push_back(Relationship{id, std::move(type), source, target, std::move(properties)});
  out_[static_cast<std::size_t>(source)].push_back(id);
  in_[static_cast<std::size_t>(target)].push_back(id);
  return id;
}

std::span<const NodeId> PropertyGraph::nodes_with_label(const std::string& label) const {
  auto it = by_label_.find(label);
  if (it == by_label_.end()) return {};
  return it->second;
}

std::span<const RelId> PropertyGraph::outgoing(NodeId id) const {
  return out_.at(static_cast<std::size_t>(id));
}

std::span<const RelId> PropertyGraph::incoming(NodeId id) const {
  return in_.at(static_cast<std::size_t>(id));
}

bool GraphSchema::has_property(const std::string& label, const std::string& property) const {
  auto it = properties.find(label);
  return it != properties.end() && it->second.count(property) > 0;
}

std::vector<std::string> GraphSchema::labels_with_property(const std::string& property) const {
  std::vector<std::string> out;
  for (const auto& [label, props] : properties) {
    if (props.count(property)) out.push_back(label);
  }
  return out;
}

std::vector<std::string> GraphSchema::types_connecting(const std::string& a,
                                                       const std::string& b) const {
  std::vector<std::string> out;
  for (const auto& [type, ends] : relationship_types) {
    if ((ends.first == a && ends.second == b) || (ends.first == b && ends.second == a)) {
      out.push_back(type);
    }
  }
  return out;
}

bool GraphSchema::touches(const std::string& type, const std::string& label) const {
  auto it = relationship_types.find(type);
  return it != relationship_types.end() &&
         (it->second.first == label || it->second.second == label);
}

std::set<std::string> GraphSchema::all_properties() const {
  std::set<std::string> out;
  for (const auto& [label, props] : properties) out.insert(props.begin(), props.end());
  return out;
}

GraphSchema extract_schema(const PropertyGraph& graph) {
  GraphSchema schema;
  for (const auto& node : graph.nodes()) {
    schema.labels.insert(node.label);
    auto& props = schema.properties[node.label];
    for (const auto& [key, value] : node.properties) props.insert(key);
  }
  for (const auto& rel : graph.relationships()) {
    std::pair<std::string, std::string> ends{graph.node(rel.source).label,
                                             graph.node(rel.target).label};
    auto [it, inserted] = schema.relationship_types.emplace(rel.type, ends);
    if (!inserted && it->second != ends) {
      throw SchemaConflict("relationship type " + rel.type + " links both " + it->second.first +
                           "->" + it->second.second + " and " + ends.first + "->" + ends.second);
    }
  }
  return schema;
}

GraphSummary graph_summary(const PropertyGraph& graph) {
  GraphSummary s;
  s.node_count = graph.nodes().size();
  s.relationship_count = graph.relationships().size();
  for (const auto& n : graph.nodes()) ++s.per_label[n.label];
  for (const auto& r : graph.relationships()) ++s.per_type[r.type];
  return s;
}

}  // namespace nlds

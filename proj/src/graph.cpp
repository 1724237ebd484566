#include "sheafdiff/graph.hpp"

#include <algorithm>
#include <string>

#include "sheafdiff/errors.hpp"

namespace sheafdiff {

Graph::Graph(std::size_t vertex_count) : adjacency_(vertex_count) {}

Graph::Graph(std::size_t vertex_count, std::span<const std::pair<VertexId, VertexId>> edges)
    : Graph(vertex_count) {
  for (const auto& [a, b] : edges) add_edge(a, b);
}

EdgeId Graph::add_edge(VertexId a, VertexId b) {
  if (a >= vertex_count() || b >= vertex_count()) {
    throw StructuralError("edge {" + std::to_string(a) + ", " + std::to_string(b) +
                          "} references a vertex outside [0, " +
                          std::to_string(vertex_count()) + ")");
  }
  if (a == b) throw StructuralError("self-loop at vertex " + std::to_string(a));
  if (has_edge(a, b)) {
    throw StructuralError("duplicate edge {" + std::to_string(a) + ", " + std::to_string(b) +
                          "}");
  }
  const EdgeId id = edges_.size();
  edges_.push_back(Edge{std::min(a, b), std::max(a, b)});
  adjacency_[a].push_back({b, id});
  adjacency_[b].push_back({a, id});
  return id;
}

std::vector<VertexId> Graph::neighbors(VertexId i) const {
  std::vector<VertexId> out;
  out.reserve(adjacency_.at(i).size());
  for (const auto& inc : adjacency_[i]) out.push_back(inc.neighbor);
  return out;
}

std::optional<EdgeId> Graph::find_edge(VertexId a, VertexId b) const {
  if (a >= vertex_count() || b >= vertex_count()) return std::nullopt;
  const auto& list = adjacency_[a].size() <= adjacency_[b].size() ? adjacency_[a] : adjacency_[b];
  const VertexId other = adjacency_[a].size() <= adjacency_[b].size() ? b : a;
  for (const auto& inc : list) {
    if (inc.neighbor == other) return inc.edge;
  }
  return std::nullopt;
}

std::vector<std::size_t> Graph::component_labels() const {
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(vertex_count(), kUnset);
  std::vector<VertexId> stack;
  std::size_t next = 0;
  for (VertexId s = 0; s < vertex_count(); ++s) {
    if (label[s] != kUnset) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const VertexId v = stack.back();
      stack.pop_back();
      for (const auto& inc : adjacency_[v]) {
        if (label[inc.neighbor] == kUnset) {
          label[inc.neighbor] = next;
          stack.push_back(inc.neighbor);
        }
      }
    }
    ++next;
  }
  return label;
}

std::size_t Graph::component_count() const {
  const auto labels = component_labels();
  std::size_t count = 0;
  for (auto l : labels) count = std::max(count, l + 1);
  return count;
}

}  // namespace sheafdiff

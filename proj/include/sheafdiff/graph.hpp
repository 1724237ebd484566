#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace sheafdiff {

using VertexId = std::size_t;
using EdgeId = std::size_t;

/// Undirected edge stored with u < v.
struct Edge {
  VertexId u = 0;
  VertexId v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Simple undirected graph. Edge ids follow insertion order; neighbor lists
/// follow the order in which incident edges were added.
class Graph {
 public:
  struct Incidence {
    VertexId neighbor;
    EdgeId edge;
  };

  Graph() = default;
  explicit Graph(std::size_t vertex_count);
  Graph(std::size_t vertex_count, std::span<const std::pair<VertexId, VertexId>> edges);

  /// Adds edge {a, b}. Throws StructuralError on self-loops, duplicates or
  /// out-of-range endpoints.
  EdgeId add_edge(VertexId a, VertexId b);

  std::size_t vertex_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  const std::vector<Incidence>& incidences(VertexId i) const { return adjacency_.at(i); }
  std::vector<VertexId> neighbors(VertexId i) const;
  std::size_t degree(VertexId i) const { return adjacency_.at(i).size(); }

  std::optional<EdgeId> find_edge(VertexId a, VertexId b) const;
  bool has_edge(VertexId a, VertexId b) const { return find_edge(a, b).has_value(); }

  /// Component label per vertex, labels numbered from 0 in order of first vertex.
  std::vector<std::size_t> component_labels() const;
  std::size_t component_count() const;
  bool is_connected() const { return component_count() <= 1; }

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
};

}  // namespace sheafdiff

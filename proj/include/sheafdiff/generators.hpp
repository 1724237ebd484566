#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "sheafdiff/potentials.hpp"

namespace sheafdiff {

/// Simple k-regular graph from the pairing (configuration) model, rejecting
/// pairings with self-loops or multi-edges. Throws RetryableError after
/// `max_retries` rejected pairings.
Graph random_regular_graph(std::size_t n, std::size_t k, std::uint64_t seed,
                           std::size_t max_retries = 1000);

/// G(n, p): each unordered pair independently with probability p.
Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed);

/// R^n on every stalk, identity restriction maps.
CellularSheaf constant_sheaf(const Graph& graph, std::size_t n);

/// Every restriction an edge_dim x vertex_dim matrix with i.i.d. U[0, 1]
/// entries; the two maps of an edge are drawn independently.
CellularSheaf random_restriction_sheaf(const Graph& graph, std::size_t vertex_dim,
                                       std::size_t edge_dim, std::uint64_t seed);

/// Restriction map F with F^T F = W for a PSD weight W: column-pivoted QR of
/// the PSD square root of W, R truncated to its numerical rank and
/// un-permuted. Always returns at least one (possibly zero) row.
Matrix restriction_from_weight(const Matrix& weight, double pivot_threshold = 1e-10);

/// Sheaf whose Laplacian is the matrix-weighted Laplacian of (graph, weights),
/// both restrictions of edge e equal to restriction_from_weight(weights[e]).
CellularSheaf sheaf_from_weights(const Graph& graph, const std::vector<Matrix>& weights);

struct MatrixWeightedSheaf {
  CellularSheaf sheaf;
  std::vector<Matrix> weights;
};

/// Random weights W = G^T G with G a standard Gaussian dim x dim matrix
/// (strictly PD) with probability pd_probability, else (dim - 1) x dim.
MatrixWeightedSheaf matrix_weighted_sheaf(const Graph& graph, std::size_t dim,
                                          double pd_probability, std::uint64_t seed);

/// Matrix-weighted Laplacian assembled directly from the weights.
Matrix matrix_weighted_laplacian(const Graph& graph, const std::vector<Matrix>& weights);

/// Two teams of three UAVs, state [p; v] in R^3 + R^3 per agent.
/// Vertices 0..5 are agents 1..6; leaders are 0 and 3.
struct UavFormation {
  CellularSheaf sheaf;
  PotentialSet potentials;
};

/// Target displacements, in order, for leader-follower edges 12, 13, 45, 46
/// (p_leader - p_follower).
using UavDisplacements = std::array<Eigen::Vector3d, 4>;

UavFormation uav_formation_sheaf(const UavDisplacements& displacements);

/// i.i.d. N(0, variance) entries. Throws std::invalid_argument unless variance > 0.
Cochain0 gaussian_initial_condition(const CellularSheaf& sheaf, double variance,
                                    std::uint64_t seed);

struct GraphSpec {
  enum class Kind { kRegular, kErdosRenyi, kExplicit };

  Kind kind = Kind::kRegular;
  std::size_t n = 20;
  std::size_t k = 4;
  double p = 0.3;
  std::vector<std::pair<VertexId, VertexId>> edges;
};

struct SheafSpec {
  enum class Kind { kConstant, kRandomRestriction, kMatrixWeighted };

  Kind kind = Kind::kRandomRestriction;
  std::size_t vertex_dim = 4;
  std::size_t edge_dim = 1;
  double pd_probability = 0.2;
};

struct GeneratorConfig {
  GraphSpec graph;
  SheafSpec sheaf;
  std::uint64_t seed = 0;
};

struct GeneratedSheaf {
  CellularSheaf sheaf;
  /// Matrix weights when the sheaf kind is matrix-weighted, else empty.
  std::vector<Matrix> weights;
};

Graph generate_graph(const GraphSpec& spec, std::uint64_t seed);
GeneratedSheaf generate_sheaf(const Graph& graph, const SheafSpec& spec, std::uint64_t seed);
/// Graph and sheaf from independent streams of config.seed.
GeneratedSheaf generate(const GeneratorConfig& config);

}  // namespace sheafdiff

#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "sheafdiff/graph.hpp"

namespace sheafdiff {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Flat 0-cochain: vertex blocks laid out by CellularSheaf::vertex_offset.
using Cochain0 = Eigen::VectorXd;
/// Flat 1-cochain: edge blocks laid out by CellularSheaf::edge_offset.
using Cochain1 = Eigen::VectorXd;

/// The pair of restriction maps attached to one edge {u, v} (u < v).
/// `from_u` maps F(u) -> F(uv), `from_v` maps F(v) -> F(uv).
struct EdgeRestrictions {
  Matrix from_u;
  Matrix from_v;
};

/// Cellular sheaf over an undirected graph with Euclidean stalks.
///
/// Construction validates every restriction shape against the declared
/// stalk dimensions and fixes the vertex/edge offset maps used for all
/// flattening. Instances are immutable afterwards.
class CellularSheaf {
 public:
  CellularSheaf(Graph graph, std::vector<std::size_t> vertex_dims,
                std::vector<std::size_t> edge_dims,
                std::vector<EdgeRestrictions> restrictions);

  const Graph& graph() const { return graph_; }
  std::size_t vertex_count() const { return graph_.vertex_count(); }
  std::size_t edge_count() const { return graph_.edge_count(); }

  std::size_t vertex_dim(VertexId i) const { return vertex_dims_.at(i); }
  std::size_t edge_dim(EdgeId e) const { return edge_dims_.at(e); }
  const std::vector<std::size_t>& vertex_dims() const { return vertex_dims_; }
  const std::vector<std::size_t>& edge_dims() const { return edge_dims_; }

  std::size_t vertex_offset(VertexId i) const { return vertex_offsets_.at(i); }
  std::size_t edge_offset(EdgeId e) const { return edge_offsets_.at(e); }
  /// dim C^0 = sum of vertex stalk dimensions.
  std::size_t c0_dim() const { return c0_dim_; }
  /// dim C^1 = sum of edge stalk dimensions.
  std::size_t c1_dim() const { return c1_dim_; }

  const EdgeRestrictions& restrictions(EdgeId e) const { return restrictions_.at(e); }
  /// F_{i <| e}; throws StructuralError if i is not an endpoint of e.
  const Matrix& restriction(VertexId i, EdgeId e) const;

  auto vertex_block(const Cochain0& x, VertexId i) const {
    return x.segment(static_cast<Eigen::Index>(vertex_offsets_[i]),
                     static_cast<Eigen::Index>(vertex_dims_[i]));
  }
  auto vertex_block(Cochain0& x, VertexId i) const {
    return x.segment(static_cast<Eigen::Index>(vertex_offsets_[i]),
                     static_cast<Eigen::Index>(vertex_dims_[i]));
  }
  auto edge_block(const Cochain1& y, EdgeId e) const {
    return y.segment(static_cast<Eigen::Index>(edge_offsets_[e]),
                     static_cast<Eigen::Index>(edge_dims_[e]));
  }
  auto edge_block(Cochain1& y, EdgeId e) const {
    return y.segment(static_cast<Eigen::Index>(edge_offsets_[e]),
                     static_cast<Eigen::Index>(edge_dims_[e]));
  }

  Cochain0 zero_c0() const { return Cochain0::Zero(static_cast<Eigen::Index>(c0_dim_)); }
  Cochain1 zero_c1() const { return Cochain1::Zero(static_cast<Eigen::Index>(c1_dim_)); }

  /// Throws StructuralError unless x has length dim C^0.
  void check_c0(const Cochain0& x) const;
  /// Throws StructuralError unless y has length dim C^1.
  void check_c1(const Cochain1& y) const;

 private:
  Graph graph_;
  std::vector<std::size_t> vertex_dims_;
  std::vector<std::size_t> edge_dims_;
  std::vector<EdgeRestrictions> restrictions_;
  std::vector<std::size_t> vertex_offsets_;
  std::vector<std::size_t> edge_offsets_;
  std::size_t c0_dim_ = 0;
  std::size_t c1_dim_ = 0;
};

/// Which endpoint plays the role of "i" in (delta x)_ij = F_i x_i - F_j x_j.
/// `flipped[e] == false` means the stored order (u, v) with u < v.
struct Orientation {
  std::vector<bool> flipped;

  static Orientation canonical(const CellularSheaf& sheaf) {
    return Orientation{std::vector<bool>(sheaf.edge_count(), false)};
  }
};

Cochain1 coboundary_apply(const CellularSheaf& sheaf, const Cochain0& x);
Cochain1 coboundary_apply(const CellularSheaf& sheaf, const Cochain0& x,
                          const Orientation& orientation);

/// Dense (dim C^1) x (dim C^0) matrix of the coboundary operator.
Matrix coboundary_matrix(const CellularSheaf& sheaf);
Matrix coboundary_matrix(const CellularSheaf& sheaf, const Orientation& orientation);

/// L = delta^T delta, assembled blockwise: F_i^T F_i on the diagonal and
/// -F_i^T F_j off the diagonal for every edge.
Matrix linear_laplacian(const CellularSheaf& sheaf);

double inner_product_c0(const CellularSheaf& sheaf, const Cochain0& x, const Cochain0& x2);
double inner_product_c1(const CellularSheaf& sheaf, const Cochain1& y, const Cochain1& y2);

inline constexpr double kDefaultKernelTolerance = 1e-10;

/// Orthonormal basis of the numerical kernel of the coboundary, one column
/// per global section direction.
struct SectionBasis {
  Matrix basis;
  double rank_tolerance = kDefaultKernelTolerance;

  std::size_t dimension() const { return static_cast<std::size_t>(basis.cols()); }
  /// Orthogonal projection onto span(basis).
  Cochain0 project(const Cochain0& x) const { return basis * (basis.transpose() * x); }
};

/// Kernel of delta by SVD: right singular vectors with sigma <= tol * sigma_max.
SectionBasis global_sections(const CellularSheaf& sheaf, double tol = kDefaultKernelTolerance);

struct CohomologyDims {
  std::size_t h0 = 0;
  std::size_t h1 = 0;
  std::size_t rank = 0;
};

CohomologyDims cohomology_dims(const CellularSheaf& sheaf,
                               double tol = kDefaultKernelTolerance);

}  // namespace sheafdiff

#include "sheafdiff/sheaf.hpp"

#include <string>

#include "sheafdiff/errors.hpp"

namespace sheafdiff {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t v) { return static_cast<Index>(v); }

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

// Singular values and full right singular vectors of delta. Handles the
// degenerate shapes (no edges, no vertices) that BDCSVD dislikes.
struct CoboundarySvd {
  Vector singular_values;
  Matrix right;
};

CoboundarySvd coboundary_svd(const CellularSheaf& sheaf) {
  const Matrix delta = coboundary_matrix(sheaf);
  CoboundarySvd out;
  if (delta.rows() == 0 || delta.cols() == 0) {
    out.singular_values = Vector::Zero(0);
    out.right = Matrix::Identity(delta.cols(), delta.cols());
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(delta, Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  out.right = svd.matrixV();
  return out;
}

std::size_t numerical_rank(const Vector& sigma, double tol) {
  if (sigma.size() == 0) return 0;
  const double cutoff = tol * sigma(0);
  std::size_t rank = 0;
  for (Index k = 0; k < sigma.size(); ++k) {
    if (sigma(k) > cutoff) ++rank;
  }
  return rank;
}

}  // namespace

CellularSheaf::CellularSheaf(Graph graph, std::vector<std::size_t> vertex_dims,
                             std::vector<std::size_t> edge_dims,
                             std::vector<EdgeRestrictions> restrictions)
    : graph_(std::move(graph)),
      vertex_dims_(std::move(vertex_dims)),
      edge_dims_(std::move(edge_dims)),
      restrictions_(std::move(restrictions)) {
  if (vertex_dims_.size() != graph_.vertex_count()) {
    throw StructuralError("expected " + std::to_string(graph_.vertex_count()) +
                          " vertex dimensions, got " + std::to_string(vertex_dims_.size()));
  }
  if (edge_dims_.size() != graph_.edge_count()) {
    throw StructuralError("expected " + std::to_string(graph_.edge_count()) +
                          " edge dimensions, got " + std::to_string(edge_dims_.size()));
  }
  if (restrictions_.size() != graph_.edge_count()) {
    throw StructuralError("expected restriction maps for " +
                          std::to_string(graph_.edge_count()) + " edges, got " +
                          std::to_string(restrictions_.size()));
  }
  for (std::size_t i = 0; i < vertex_dims_.size(); ++i) {
    if (vertex_dims_[i] == 0) {
      throw StructuralError("vertex " + std::to_string(i) + " has a zero-dimensional stalk");
    }
  }
  for (EdgeId e = 0; e < edge_dims_.size(); ++e) {
    if (edge_dims_[e] == 0) {
      throw StructuralError("edge " + std::to_string(e) + " has a zero-dimensional stalk");
    }
    const Edge& ed = graph_.edge(e);
    const auto& r = restrictions_[e];
    const auto check = [&](const Matrix& m, VertexId v) {
      if (m.rows() != idx(edge_dims_[e]) || m.cols() != idx(vertex_dims_[v])) {
        throw StructuralError("restriction " + std::to_string(v) + "|" + std::to_string(ed.u) +
                              "-" + std::to_string(ed.v) + " has shape " + shape(m) +
                              ", expected " + std::to_string(edge_dims_[e]) + "x" +
                              std::to_string(vertex_dims_[v]));
      }
    };
    check(r.from_u, ed.u);
    check(r.from_v, ed.v);
  }

  vertex_offsets_.resize(vertex_dims_.size());
  for (std::size_t i = 0; i < vertex_dims_.size(); ++i) {
    vertex_offsets_[i] = c0_dim_;
    c0_dim_ += vertex_dims_[i];
  }
  edge_offsets_.resize(edge_dims_.size());
  for (std::size_t e = 0; e < edge_dims_.size(); ++e) {
    edge_offsets_[e] = c1_dim_;
    c1_dim_ += edge_dims_[e];
  }
}

const Matrix& CellularSheaf::restriction(VertexId i, EdgeId e) const {
  const Edge& ed = graph_.edge(e);
  if (i == ed.u) return restrictions_[e].from_u;
  if (i == ed.v) return restrictions_[e].from_v;
  throw StructuralError("vertex " + std::to_string(i) + " is not an endpoint of edge " +
                        std::to_string(e));
}

void CellularSheaf::check_c0(const Cochain0& x) const {
  if (x.size() != idx(c0_dim_)) {
    throw StructuralError("0-cochain has length " + std::to_string(x.size()) +
                          ", sheaf expects " + std::to_string(c0_dim_));
  }
}

void CellularSheaf::check_c1(const Cochain1& y) const {
  if (y.size() != idx(c1_dim_)) {
    throw StructuralError("1-cochain has length " + std::to_string(y.size()) +
                          ", sheaf expects " + std::to_string(c1_dim_));
  }
}

Cochain1 coboundary_apply(const CellularSheaf& sheaf, const Cochain0& x) {
  return coboundary_apply(sheaf, x, Orientation::canonical(sheaf));
}

Cochain1 coboundary_apply(const CellularSheaf& sheaf, const Cochain0& x,
                          const Orientation& orientation) {
  sheaf.check_c0(x);
  if (orientation.flipped.size() != sheaf.edge_count()) {
    throw StructuralError("orientation covers " + std::to_string(orientation.flipped.size()) +
                          " edges, sheaf has " + std::to_string(sheaf.edge_count()));
  }
  Cochain1 y = sheaf.zero_c1();
  for (EdgeId e = 0; e < sheaf.edge_count(); ++e) {
    const Edge& ed = sheaf.graph().edge(e);
    const auto& r = sheaf.restrictions(e);
    auto ye = sheaf.edge_block(y, e);
    ye.noalias() = r.from_u * sheaf.vertex_block(x, ed.u);
    ye.noalias() -= r.from_v * sheaf.vertex_block(x, ed.v);
    if (orientation.flipped[e]) ye = -ye;
  }
  return y;
}

Matrix coboundary_matrix(const CellularSheaf& sheaf) {
  return coboundary_matrix(sheaf, Orientation::canonical(sheaf));
}

Matrix coboundary_matrix(const CellularSheaf& sheaf, const Orientation& orientation) {
  if (orientation.flipped.size() != sheaf.edge_count()) {
    throw StructuralError("orientation covers " + std::to_string(orientation.flipped.size()) +
                          " edges, sheaf has " + std::to_string(sheaf.edge_count()));
  }
  Matrix delta = Matrix::Zero(idx(sheaf.c1_dim()), idx(sheaf.c0_dim()));
  for (EdgeId e = 0; e < sheaf.edge_count(); ++e) {
    const Edge& ed = sheaf.graph().edge(e);
    const auto& r = sheaf.restrictions(e);
    const double sign = orientation.flipped[e] ? -1.0 : 1.0;
    const Index row = idx(sheaf.edge_offset(e));
    const Index rows = idx(sheaf.edge_dim(e));
    delta.block(row, idx(sheaf.vertex_offset(ed.u)), rows, r.from_u.cols()) = sign * r.from_u;
    delta.block(row, idx(sheaf.vertex_offset(ed.v)), rows, r.from_v.cols()) = -sign * r.from_v;
  }
  return delta;
}

Matrix linear_laplacian(const CellularSheaf& sheaf) {
  const Index n = idx(sheaf.c0_dim());
  Matrix L = Matrix::Zero(n, n);
  for (EdgeId e = 0; e < sheaf.edge_count(); ++e) {
    const Edge& ed = sheaf.graph().edge(e);
    const auto& r = sheaf.restrictions(e);
    const Index ou = idx(sheaf.vertex_offset(ed.u));
    const Index ov = idx(sheaf.vertex_offset(ed.v));
    const Index du = r.from_u.cols();
    const Index dv = r.from_v.cols();
    L.block(ou, ou, du, du).noalias() += r.from_u.transpose() * r.from_u;
    L.block(ov, ov, dv, dv).noalias() += r.from_v.transpose() * r.from_v;
    L.block(ou, ov, du, dv).noalias() -= r.from_u.transpose() * r.from_v;
    L.block(ov, ou, dv, du).noalias() -= r.from_v.transpose() * r.from_u;
  }
  return L;
}

double inner_product_c0(const CellularSheaf& sheaf, const Cochain0& x, const Cochain0& x2) {
  sheaf.check_c0(x);
  sheaf.check_c0(x2);
  double sum = 0.0;
  for (VertexId i = 0; i < sheaf.vertex_count(); ++i) {
    sum += sheaf.vertex_block(x, i).dot(sheaf.vertex_block(x2, i));
  }
  return sum;
}

double inner_product_c1(const CellularSheaf& sheaf, const Cochain1& y, const Cochain1& y2) {
  sheaf.check_c1(y);
  sheaf.check_c1(y2);
  double sum = 0.0;
  for (EdgeId e = 0; e < sheaf.edge_count(); ++e) {
    sum += sheaf.edge_block(y, e).dot(sheaf.edge_block(y2, e));
  }
  return sum;
}

SectionBasis global_sections(const CellularSheaf& sheaf, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("kernel tolerance must be positive");
  const auto svd = coboundary_svd(sheaf);
  const std::size_t rank = numerical_rank(svd.singular_values, tol);
  const Index n = idx(sheaf.c0_dim());
  SectionBasis out;
  out.rank_tolerance = tol;
  out.basis = svd.right.rightCols(n - idx(rank));
  return out;
}

CohomologyDims cohomology_dims(const CellularSheaf& sheaf, double tol) {
  const auto svd = coboundary_svd(sheaf);
  CohomologyDims dims;
  dims.rank = numerical_rank(svd.singular_values, tol);
  dims.h0 = sheaf.c0_dim() - dims.rank;
  dims.h1 = sheaf.c1_dim() - dims.rank;
  return dims;
}

}  // namespace sheafdiff

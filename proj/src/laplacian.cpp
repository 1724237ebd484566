#include "sheafdiff/laplacian.hpp"

#include <cmath>
#include <string>

#include "sheafdiff/errors.hpp"
#include "laplacian_detail.hpp"

namespace sheafdiff {

namespace detail {

// The single code path for a vertex block; both the global operator and the
// agents' local updates go through here.
void accumulate_block(const CellularSheaf& sheaf, const PotentialSet& potentials, VertexId i,
                      const Vector& own, std::span<const Vector> neighbor_values, Vector& block,
                      BlockScratch& s) {
  block.setZero(static_cast<Eigen::Index>(sheaf.vertex_dim(i)));
  const auto& incidences = sheaf.graph().incidences(i);
  for (std::size_t k = 0; k < incidences.size(); ++k) {
    const EdgeId e = incidences[k].edge;
    const Edge& ed = sheaf.graph().edge(e);
    const auto& r = sheaf.restrictions(e);
    const bool i_is_u = ed.u == i;
    const Vector& xu = i_is_u ? own : neighbor_values[k];
    const Vector& xv = i_is_u ? neighbor_values[k] : own;
    s.y.noalias() = r.from_u * xu;
    s.y.noalias() -= r.from_v * xv;
    potentials[e].gradient_into(s.y, s.g);
    if (i_is_u) {
      block.noalias() += r.from_u.transpose() * s.g;
    } else {
      block.noalias() -= r.from_v.transpose() * s.g;
    }
  }
}

}  // namespace detail

namespace {

void check_block(const CellularSheaf& sheaf, VertexId v, const Vector& value) {
  if (value.size() != static_cast<Eigen::Index>(sheaf.vertex_dim(v))) {
    throw StructuralError("value for vertex " + std::to_string(v) + " has length " +
                          std::to_string(value.size()) + ", stalk has dimension " +
                          std::to_string(sheaf.vertex_dim(v)));
  }
}

}  // namespace

Cochain0 nonlinear_laplacian_apply(const CellularSheaf& sheaf, const PotentialSet& potentials,
                                   const Cochain0& x) {
  potentials.validate_for(sheaf);
  sheaf.check_c0(x);
  Cochain0 out = sheaf.zero_c0();
  detail::BlockScratch s;
  Vector own;
  Vector block;
  std::vector<Vector> neighbors;
  for (VertexId i = 0; i < sheaf.vertex_count(); ++i) {
    own = sheaf.vertex_block(x, i);
    const auto& incidences = sheaf.graph().incidences(i);
    neighbors.resize(incidences.size());
    for (std::size_t k = 0; k < incidences.size(); ++k) {
      neighbors[k] = sheaf.vertex_block(x, incidences[k].neighbor);
    }
    detail::accumulate_block(sheaf, potentials, i, own, neighbors, block, s);
    sheaf.vertex_block(out, i) = block;
  }
  return out;
}

Vector local_laplacian_block(const CellularSheaf& sheaf, const PotentialSet& potentials,
                             VertexId i, const Vector& own,
                             std::span<const Vector> neighbor_values) {
  potentials.validate_for(sheaf);
  if (i >= sheaf.vertex_count()) {
    throw StructuralError("vertex " + std::to_string(i) + " out of range");
  }
  const auto& incidences = sheaf.graph().incidences(i);
  if (neighbor_values.size() != incidences.size()) {
    throw ConfigurationError("vertex " + std::to_string(i) + " has " +
                             std::to_string(incidences.size()) + " neighbors, got " +
                             std::to_string(neighbor_values.size()) + " values");
  }
  check_block(sheaf, i, own);
  for (std::size_t k = 0; k < incidences.size(); ++k) {
    check_block(sheaf, incidences[k].neighbor, neighbor_values[k]);
  }
  detail::BlockScratch s;
  Vector block;
  detail::accumulate_block(sheaf, potentials, i, own, neighbor_values, block, s);
  return block;
}

Vector local_laplacian_block(const CellularSheaf& sheaf, const PotentialSet& potentials,
                             VertexId i, const std::map<VertexId, Vector>& x_local) {
  const auto own = x_local.find(i);
  if (own == x_local.end()) {
    throw ConfigurationError("no value supplied for vertex " + std::to_string(i));
  }
  std::vector<Vector> neighbors;
  for (const auto& inc : sheaf.graph().incidences(i)) {
    const auto it = x_local.find(inc.neighbor);
    if (it == x_local.end()) {
      throw ConfigurationError("no value supplied for neighbor " + std::to_string(inc.neighbor) +
                               " of vertex " + std::to_string(i));
    }
    neighbors.push_back(it->second);
  }
  return local_laplacian_block(sheaf, potentials, i, own->second, neighbors);
}

EnergyResidualEvaluator::EnergyResidualEvaluator(const CellularSheaf& sheaf,
                                                 const PotentialSet& potentials)
    : sheaf_(sheaf), potentials_(potentials), gradient_(sheaf.zero_c0()) {
  potentials.validate_for(sheaf);
}

EnergyResidual EnergyResidualEvaluator::operator()(const Cochain0& x) {
  sheaf_.check_c0(x);
  gradient_.setZero();
  double energy = 0.0;
  for (EdgeId e = 0; e < sheaf_.edge_count(); ++e) {
    const Edge& ed = sheaf_.graph().edge(e);
    const auto& r = sheaf_.restrictions(e);
    xu_ = sheaf_.vertex_block(x, ed.u);
    xv_ = sheaf_.vertex_block(x, ed.v);
    y_.noalias() = r.from_u * xu_;
    y_.noalias() -= r.from_v * xv_;
    const auto& p = potentials_[e];
    energy += p.value(y_);
    p.gradient_into(y_, g_);
    sheaf_.vertex_block(gradient_, ed.u).noalias() += r.from_u.transpose() * g_;
    sheaf_.vertex_block(gradient_, ed.v).noalias() -= r.from_v.transpose() * g_;
  }
  return {energy, gradient_.norm()};
}

}  // namespace sheafdiff

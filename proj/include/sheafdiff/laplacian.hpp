#pragma once

#include <map>
#include <span>

#include "sheafdiff/potentials.hpp"

namespace sheafdiff {

/// L^{grad U} x = delta^T grad U(delta x), the gradient of the Dirichlet energy.
///
/// Evaluated vertex by vertex through local_laplacian_block so that both
/// paths produce bit-identical blocks.
Cochain0 nonlinear_laplacian_apply(const CellularSheaf& sheaf, const PotentialSet& potentials,
                                   const Cochain0& x);

/// Block i of the nonlinear Laplacian from agent-local data:
///   sum_{j in N_i} F_{i<|ij}^T grad U_ij(F_{i<|ij} x_i - F_{j<|ij} x_j).
/// `neighbor_values[k]` is the (possibly stale) value of the k-th entry of
/// sheaf.graph().incidences(i). The edge potential is always evaluated in the
/// edge's canonical orientation.
Vector local_laplacian_block(const CellularSheaf& sheaf, const PotentialSet& potentials,
                             VertexId i, const Vector& own,
                             std::span<const Vector> neighbor_values);

/// Same as above with values keyed by vertex; throws ConfigurationError if i
/// or any neighbor of i is missing.
Vector local_laplacian_block(const CellularSheaf& sheaf, const PotentialSet& potentials,
                             VertexId i, const std::map<VertexId, Vector>& x_local);

/// Energy and |L^{grad U} x| in a single pass over the edges. Used for
/// per-tick metrics; summation order differs from nonlinear_laplacian_apply.
struct EnergyResidual {
  double energy = 0.0;
  double residual_norm = 0.0;
};

class EnergyResidualEvaluator {
 public:
  EnergyResidualEvaluator(const CellularSheaf& sheaf, const PotentialSet& potentials);
  EnergyResidual operator()(const Cochain0& x);

 private:
  const CellularSheaf& sheaf_;
  const PotentialSet& potentials_;
  Cochain0 gradient_;
  Vector xu_, xv_, y_, g_;
};

}  // namespace sheafdiff

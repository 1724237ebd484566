#pragma once

#include <span>

#include "sheafdiff/potentials.hpp"

namespace sheafdiff::detail {

struct BlockScratch {
  Vector y;
  Vector g;
};

/// Unchecked vertex block of the nonlinear Laplacian; `block` is overwritten.
void accumulate_block(const CellularSheaf& sheaf, const PotentialSet& potentials, VertexId i,
                      const Vector& own, std::span<const Vector> neighbor_values, Vector& block,
                      BlockScratch& s);

}  // namespace sheafdiff::detail

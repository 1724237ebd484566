#include "sheafdiff/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sheafdiff/errors.hpp"

namespace sheafdiff {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t v) { return static_cast<Index>(v); }

void check_dim(const EdgePotential& p, const Vector& y) {
  if (y.size() != idx(p.dim())) {
    throw StructuralError("edge vector has length " + std::to_string(y.size()) +
                          ", potential expects " + std::to_string(p.dim()));
  }
}

}  // namespace

EdgePotential EdgePotential::quadratic(std::size_t dim, double weight) {
  if (!(weight > 0.0)) throw ConfigurationError("potential weight must be positive");
  EdgePotential p;
  p.kind_ = Kind::kQuadratic;
  p.dim_ = dim;
  p.offset_ = Vector::Zero(idx(dim));
  p.weight_ = weight;
  p.m_ = weight;
  p.K_ = weight;
  return p;
}

EdgePotential EdgePotential::offset_quadratic(Vector offset, double weight) {
  if (!(weight > 0.0)) throw ConfigurationError("potential weight must be positive");
  EdgePotential p;
  p.kind_ = Kind::kOffsetQuadratic;
  p.dim_ = static_cast<std::size_t>(offset.size());
  p.offset_ = std::move(offset);
  p.weight_ = weight;
  p.m_ = weight;
  p.K_ = weight;
  return p;
}

EdgePotential EdgePotential::custom(std::size_t dim, ValueFn value, GradientFn gradient,
                                    double strong_convexity, double smoothness) {
  if (!(strong_convexity > 0.0) || !(smoothness >= strong_convexity)) {
    throw ConfigurationError("custom potential needs 0 < m_e <= K_e");
  }
  if (!value || !gradient) throw ConfigurationError("custom potential needs value and gradient");
  EdgePotential p;
  p.kind_ = Kind::kCustom;
  p.dim_ = dim;
  p.offset_ = Vector::Zero(idx(dim));
  p.m_ = strong_convexity;
  p.K_ = smoothness;
  p.value_fn_ = std::move(value);
  p.gradient_fn_ = std::move(gradient);
  return p;
}

double EdgePotential::value(const Vector& y) const {
  check_dim(*this, y);
  switch (kind_) {
    case Kind::kQuadratic:
      return 0.5 * weight_ * y.squaredNorm();
    case Kind::kOffsetQuadratic:
      return 0.5 * weight_ * (y - offset_).squaredNorm();
    case Kind::kCustom:
      return value_fn_(y);
  }
  return 0.0;
}

Vector EdgePotential::gradient(const Vector& y) const {
  check_dim(*this, y);
  Vector out;
  gradient_into(y, out);
  return out;
}

void EdgePotential::gradient_into(const Vector& y, Vector& out) const {
  switch (kind_) {
    case Kind::kQuadratic:
      out = y;
      break;
    case Kind::kOffsetQuadratic:
      out = y - offset_;
      break;
    case Kind::kCustom:
      out = gradient_fn_(y);
      return;
  }
  if (weight_ != 1.0) out *= weight_;
}

std::string to_string(EdgePotential::Kind kind) {
  switch (kind) {
    case EdgePotential::Kind::kQuadratic:
      return "quadratic";
    case EdgePotential::Kind::kOffsetQuadratic:
      return "offset_quadratic";
    case EdgePotential::Kind::kCustom:
      return "custom";
  }
  return "unknown";
}

double potential_value(const EdgePotential& p, const Vector& y) { return p.value(y); }

Vector potential_gradient(const EdgePotential& p, const Vector& y) { return p.gradient(y); }

PotentialSet::PotentialSet(std::vector<EdgePotential> potentials)
    : potentials_(std::move(potentials)) {}

PotentialSet PotentialSet::quadratic(const CellularSheaf& sheaf) {
  std::vector<EdgePotential> out;
  out.reserve(sheaf.edge_count());
  for (EdgeId e = 0; e < sheaf.edge_count(); ++e) {
    out.push_back(EdgePotential::quadratic(sheaf.edge_dim(e)));
  }
  return PotentialSet(std::move(out));
}

PotentialSet PotentialSet::offset_quadratic(const CellularSheaf& sheaf, const Cochain1& offsets) {
  sheaf.check_c1(offsets);
  std::vector<EdgePotential> out;
  out.reserve(sheaf.edge_count());
  for (EdgeId e = 0; e < sheaf.edge_count(); ++e) {
    out.push_back(EdgePotential::offset_quadratic(sheaf.edge_block(offsets, e)));
  }
  return PotentialSet(std::move(out));
}

double PotentialSet::min_strong_convexity() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : potentials_) m = std::min(m, p.strong_convexity());
  return potentials_.empty() ? 1.0 : m;
}

double PotentialSet::max_smoothness() const {
  double k = 0.0;
  for (const auto& p : potentials_) k = std::max(k, p.smoothness());
  return potentials_.empty() ? 1.0 : k;
}

bool PotentialSet::is_quadratic_family() const {
  return std::all_of(potentials_.begin(), potentials_.end(),
                     [](const EdgePotential& p) { return p.is_quadratic_family(); });
}

Cochain1 PotentialSet::stacked_offset(const CellularSheaf& sheaf) const {
  validate_for(sheaf);
  if (!is_quadratic_family()) {
    throw ConfigurationError("stacked offset is only defined for quadratic-family potentials");
  }
  Cochain1 b = sheaf.zero_c1();
  for (EdgeId e = 0; e < sheaf.edge_count(); ++e) sheaf.edge_block(b, e) = potentials_[e].offset();
  return b;
}

void PotentialSet::validate_for(const CellularSheaf& sheaf) const {
  if (potentials_.size() != sheaf.edge_count()) {
    throw ConfigurationError("potential set covers " + std::to_string(potentials_.size()) +
                             " edges, sheaf has " + std::to_string(sheaf.edge_count()));
  }
  for (EdgeId e = 0; e < sheaf.edge_count(); ++e) {
    if (potentials_[e].dim() != sheaf.edge_dim(e)) {
      throw ConfigurationError("potential on edge " + std::to_string(e) + " has dimension " +
                               std::to_string(potentials_[e].dim()) + ", edge stalk has " +
                               std::to_string(sheaf.edge_dim(e)));
    }
  }
}

double dirichlet_energy(const CellularSheaf& sheaf, const PotentialSet& potentials,
                        const Cochain0& x) {
  potentials.validate_for(sheaf);
  const Cochain1 y = coboundary_apply(sheaf, x);
  double f = 0.0;
  for (EdgeId e = 0; e < sheaf.edge_count(); ++e) {
    f += potentials[e].value(sheaf.edge_block(y, e));
  }
  return f;
}

Cochain0 MinimizerSet::project(const Cochain0& x) const {
  return particular + sections.project(x - particular);
}

MinimizerSet energy_minimum(const CellularSheaf& sheaf, const PotentialSet& potentials,
                            double tol) {
  potentials.validate_for(sheaf);
  if (!potentials.is_quadratic_family()) {
    throw ConfigurationError("energy_minimum supports quadratic and offset-quadratic potentials only");
  }
  const Index n = idx(sheaf.c0_dim());
  // Weighted least squares: minimize 1/2 |W^{1/2} (delta x - b)|^2.
  Matrix A = coboundary_matrix(sheaf);
  Cochain1 c = potentials.stacked_offset(sheaf);
  for (EdgeId e = 0; e < sheaf.edge_count(); ++e) {
    const double s = std::sqrt(potentials[e].weight());
    if (s == 1.0) continue;
    A.middleRows(idx(sheaf.edge_offset(e)), idx(sheaf.edge_dim(e))) *= s;
    sheaf.edge_block(c, e) *= s;
  }

  MinimizerSet out;
  out.sections.rank_tolerance = tol;
  if (A.rows() == 0 || n == 0) {
    out.particular = Cochain0::Zero(n);
    out.sections.basis = Matrix::Identity(n, n);
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double cutoff = tol * sigma(0);
  Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;

  const Vector coeffs = (svd.matrixU().leftCols(rank).transpose() * c).array() /
                        sigma.head(rank).array();
  out.particular = svd.matrixV().leftCols(rank) * coeffs;
  out.sections.basis = svd.matrixV().rightCols(n - rank);
  const double residual = (A * out.particular - c).norm();
  out.f_star = 0.5 * residual * residual;
  out.offset_in_image = residual <= 1e-8 * std::max(1.0, c.norm());
  return out;
}

}  // namespace sheafdiff

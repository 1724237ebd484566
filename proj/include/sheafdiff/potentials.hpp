#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "sheafdiff/sheaf.hpp"

namespace sheafdiff {

/// Edge potential U_e : F(e) -> R together with its strong convexity (m_e)
/// and smoothness (K_e) constants.
///
/// Built-in kinds are U(y) = w/2 |y|^2 and U(y) = w/2 |y - b|^2 with
/// m_e = K_e = w (w = 1 unless scaled). Custom potentials supply their own
/// value, gradient and constants.
class EdgePotential {
 public:
  enum class Kind { kQuadratic, kOffsetQuadratic, kCustom };

  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;

  static EdgePotential quadratic(std::size_t dim, double weight = 1.0);
  static EdgePotential offset_quadratic(Vector offset, double weight = 1.0);
  static EdgePotential custom(std::size_t dim, ValueFn value, GradientFn gradient,
                              double strong_convexity, double smoothness);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  /// Offset b_e; zero vector for plain quadratics.
  const Vector& offset() const { return offset_; }
  double weight() const { return weight_; }
  double strong_convexity() const { return m_; }
  double smoothness() const { return K_; }
  bool is_quadratic_family() const { return kind_ != Kind::kCustom; }

  double value(const Vector& y) const;
  Vector gradient(const Vector& y) const;
  /// Allocation-free gradient for hot loops; `out` is resized as needed.
  void gradient_into(const Vector& y, Vector& out) const;

 private:
  EdgePotential() = default;

  Kind kind_ = Kind::kQuadratic;
  std::size_t dim_ = 0;
  Vector offset_;
  double weight_ = 1.0;
  double m_ = 1.0;
  double K_ = 1.0;
  ValueFn value_fn_;
  GradientFn gradient_fn_;
};

std::string to_string(EdgePotential::Kind kind);

double potential_value(const EdgePotential& p, const Vector& y);
Vector potential_gradient(const EdgePotential& p, const Vector& y);

/// One potential per edge id.
class PotentialSet {
 public:
  PotentialSet() = default;
  explicit PotentialSet(std::vector<EdgePotential> potentials);

  /// U_e(y) = 1/2 |y|^2 on every edge.
  static PotentialSet quadratic(const CellularSheaf& sheaf);
  /// U_e(y) = 1/2 |y - b_e|^2 with b read from the edge blocks of `offsets`.
  static PotentialSet offset_quadratic(const CellularSheaf& sheaf, const Cochain1& offsets);

  std::size_t size() const { return potentials_.size(); }
  const EdgePotential& operator[](EdgeId e) const { return potentials_[e]; }
  const EdgePotential& at(EdgeId e) const { return potentials_.at(e); }
  const std::vector<EdgePotential>& potentials() const { return potentials_; }

  /// m = min_e m_e.
  double min_strong_convexity() const;
  /// K_max = max_e K_e.
  double max_smoothness() const;
  bool is_quadratic_family() const;

  /// Stacked minimizer b of the global potential (quadratic family only).
  Cochain1 stacked_offset(const CellularSheaf& sheaf) const;

  /// Throws ConfigurationError unless there is exactly one potential per edge
  /// with matching stalk dimension.
  void validate_for(const CellularSheaf& sheaf) const;

 private:
  std::vector<EdgePotential> potentials_;
};

/// f(x) = sum_e U_e((delta x)_e).
double dirichlet_energy(const CellularSheaf& sheaf, const PotentialSet& potentials,
                        const Cochain0& x);

/// argmin f as an affine subspace: particular + span(sections).
struct MinimizerSet {
  double f_star = 0.0;
  Cochain0 particular;
  SectionBasis sections;
  /// False when the stacked offset is not in image(delta); the set is then
  /// the least-squares characterization rather than exact shifted sections.
  bool offset_in_image = true;

  /// Orthogonal projection of x onto the minimizer set.
  Cochain0 project(const Cochain0& x) const;
  double distance(const Cochain0& x) const { return (x - project(x)).norm(); }
};

/// f* and the minimizer set for quadratic-family potentials, using the same
/// SVD rank tolerance as global_sections. Throws ConfigurationError for
/// custom potentials.
MinimizerSet energy_minimum(const CellularSheaf& sheaf, const PotentialSet& potentials,
                            double tol = kDefaultKernelTolerance);

}  // namespace sheafdiff

#pragma once

#include <optional>

#include "sheafdiff/potentials.hpp"

namespace sheafdiff {

inline constexpr double kDefaultZeroThreshold = 1e-9;

/// Spectrum of the linear sheaf Laplacian and the convergence constants
/// derived from it.
struct SpectralReport {
  /// Ascending eigenvalues of L.
  Vector eigenvalues;
  double lambda_max = 0.0;
  /// Smallest eigenvalue above zero_threshold * lambda_max; absent when L = 0.
  std::optional<double> lambda_2;
  std::optional<double> sigma_2;
  double sigma_max = 0.0;
  double zero_threshold = kDefaultZeroThreshold;
  /// Number of eigenvalues treated as zero (= dim H^0).
  std::size_t zero_multiplicity = 0;

  // Filled by spectral_report(); zero/absent after spectrum() alone.
  double K = 0.0;
  std::optional<double> kappa;
  double m = 0.0;
};

/// Dense symmetric eigendecomposition of linear_laplacian(sheaf).
SpectralReport spectrum(const CellularSheaf& sheaf,
                        double zero_threshold = kDefaultZeroThreshold);

/// K = (max_e K_e) * lambda_max(L).
double lipschitz_constant(const SpectralReport& report, const PotentialSet& potentials);

/// kappa = 1 / (m * sigma_2(delta)). Throws ConfigurationError if lambda_2
/// is absent.
double eb_constant(const SpectralReport& report, const PotentialSet& potentials);

/// spectrum() plus K, m and (when defined) kappa.
SpectralReport spectral_report(const CellularSheaf& sheaf, const PotentialSet& potentials,
                               double zero_threshold = kDefaultZeroThreshold);

/// Singular values of the coboundary matrix, descending.
Vector coboundary_singular_values(const CellularSheaf& sheaf);

/// Nearest point of argmin f to x (quadratic-family potentials only).
Cochain0 project_onto_minimizers(const CellularSheaf& sheaf, const PotentialSet& potentials,
                                 const Cochain0& x);

}  // namespace sheafdiff

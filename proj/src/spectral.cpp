#include "sheafdiff/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "sheafdiff/errors.hpp"

namespace sheafdiff {

SpectralReport spectrum(const CellularSheaf& sheaf, double zero_threshold) {
  SpectralReport report;
  report.zero_threshold = zero_threshold;
  const Matrix L = linear_laplacian(sheaf);
  if (L.rows() == 0) {
    report.eigenvalues = Vector::Zero(0);
    return report;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(L, Eigen::EigenvaluesOnly);
  report.eigenvalues = eig.eigenvalues();
  report.lambda_max = std::max(0.0, report.eigenvalues(report.eigenvalues.size() - 1));
  report.sigma_max = std::sqrt(report.lambda_max);
  const double cutoff = zero_threshold * report.lambda_max;
  for (Eigen::Index k = 0; k < report.eigenvalues.size(); ++k) {
    const double lambda = report.eigenvalues(k);
    if (report.lambda_max > 0.0 && lambda > cutoff) {
      if (!report.lambda_2) report.lambda_2 = lambda;
    } else {
      ++report.zero_multiplicity;
    }
  }
  if (report.lambda_2) report.sigma_2 = std::sqrt(*report.lambda_2);
  return report;
}

double lipschitz_constant(const SpectralReport& report, const PotentialSet& potentials) {
  return potentials.max_smoothness() * report.lambda_max;
}

double eb_constant(const SpectralReport& report, const PotentialSet& potentials) {
  if (!report.sigma_2) {
    throw ConfigurationError("error-bound constant undefined: the coboundary is zero");
  }
  return 1.0 / (potentials.min_strong_convexity() * *report.sigma_2);
}

SpectralReport spectral_report(const CellularSheaf& sheaf, const PotentialSet& potentials,
                               double zero_threshold) {
  potentials.validate_for(sheaf);
  SpectralReport report = spectrum(sheaf, zero_threshold);
  report.K = lipschitz_constant(report, potentials);
  report.m = potentials.min_strong_convexity();
  if (report.sigma_2) report.kappa = eb_constant(report, potentials);
  return report;
}

Vector coboundary_singular_values(const CellularSheaf& sheaf) {
  const Matrix delta = coboundary_matrix(sheaf);
  if (delta.rows() == 0 || delta.cols() == 0) return Vector::Zero(0);
  return Eigen::JacobiSVD<Matrix>(delta).singularValues();
}

Cochain0 project_onto_minimizers(const CellularSheaf& sheaf, const PotentialSet& potentials,
                                 const Cochain0& x) {
  sheaf.check_c0(x);
  return energy_minimum(sheaf, potentials).project(x);
}

}  // namespace sheafdiff

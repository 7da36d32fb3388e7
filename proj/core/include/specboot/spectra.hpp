#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "specboot/datagen.hpp"
#include "specboot/measure.hpp"

namespace specboot {

/// Real polynomial f(x) = sum_k coeffs[k] x^k, the test functions used for
/// linear spectral statistics. Polynomials are analytic everywhere, so they
/// satisfy the analyticity requirement of the LSS machinery for free.
class SpectralFunction {
 public:
  SpectralFunction() : coeffs_{0.0} {}
  explicit SpectralFunction(std::vector<double> coeffs);

  double operator()(double x) const;
  std::complex<double> operator()(std::complex<double> z) const;

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  static SpectralFunction identity() { return SpectralFunction({0.0, 1.0}); }
  /// f(x) = (x-1)^2, the Ledoit-Wolf test function.
  static SpectralFunction ledoit_wolf() { return SpectralFunction({1.0, -2.0, 1.0}); }

 private:
  std::vector<double> coeffs_;
};

/// (1/n) sum_i Y_i Y_i^T. No mean subtraction: the model assumes centered
/// observations. The result is exactly symmetric.
Eigen::MatrixXd sample_covariance(const DataMatrix& Y);

/// Ascending eigenvalues of a symmetric matrix. Input must be symmetric to
/// 1e-12 relative, otherwise a ContractError is thrown.
std::vector<double> eigenvalues_sym(const Eigen::MatrixXd& M);

/// Probability measure with weight 1/len at each eigenvalue (ties merged).
DiscreteMeasure empirical_spectral_measure(const std::vector<double>& eigs);

/// m_mu(z) = int (x - z)^{-1} dmu(x) for Im z > 0.
std::complex<double> stieltjes_transform(const DiscreteMeasure& mu, std::complex<double> z);

/// Linear spectral statistic sum_j f(eigs[j]).
double lss(const std::vector<double>& eigs, const SpectralFunction& f);

/// Two-sample Kolmogorov distance: sup-norm between the right-continuous
/// ECDFs, ties aggregated.
double kolmogorov_distance(std::vector<double> s1, std::vector<double> s2);

}  // namespace specboot

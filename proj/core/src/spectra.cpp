#include "specboot/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "specboot/errors.hpp"

namespace specboot {

SpectralFunction::SpectralFunction(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw DomainError("SpectralFunction: empty coefficient list");
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw DomainError("SpectralFunction: non-finite coefficient");
  }
}

double SpectralFunction::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::complex<double> SpectralFunction::operator()(std::complex<double> z) const {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Eigen::MatrixXd sample_covariance(const DataMatrix& Y) {
  Y.validate();
  const auto n = static_cast<double>(Y.n());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(Y.p(), Y.p());
  cov.selfadjointView<Eigen::Lower>().rankUpdate(Y.values.transpose(), 1.0 / n);
  cov.triangularView<Eigen::StrictlyUpper>() =
      cov.triangularView<Eigen::StrictlyLower>().transpose();
  return cov;
}

std::vector<double> eigenvalues_sym(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw ContractError("eigenvalues_sym: matrix must be square");
  double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ContractError("eigenvalues_sym: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigenvalues_sym: eigensolver failed", 0.0);
  const Eigen::VectorXd& evals = solver.eigenvalues();
  return {evals.data(), evals.data() + evals.size()};
}

DiscreteMeasure empirical_spectral_measure(const std::vector<double>& eigs) {
  if (eigs.empty()) throw DomainError("empirical_spectral_measure: empty eigenvalue list");
  return DiscreteMeasure::from_sample(eigs);
}

std::complex<double> stieltjes_transform(const DiscreteMeasure& mu, std::complex<double> z) {
  if (!(z.imag() > 0.0)) throw DomainError("stieltjes_transform: Im z must be > 0");
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    acc += mu.weights()[i] / (mu.points()[i] - z);
  }
  return acc;
}

double lss(const std::vector<double>& eigs, const SpectralFunction& f) {
  if (eigs.empty()) throw DomainError("lss: empty eigenvalue list");
  double acc = 0.0;
  for (double lambda : eigs) acc += f(lambda);
  return acc;
}

double kolmogorov_distance(std::vector<double> s1, std::vector<double> s2) {
  if (s1.empty() || s2.empty()) throw DomainError("kolmogorov_distance: empty sample");
  std::sort(s1.begin(), s1.end());
  std::sort(s2.begin(), s2.end());
  const double n1 = static_cast<double>(s1.size());
  const double n2 = static_cast<double>(s2.size());
  std::size_t i = 0, j = 0;
  double dmax = 0.0;
  while (i < s1.size() || j < s2.size()) {
    double v;
    if (j >= s2.size() || (i < s1.size() && s1[i] <= s2[j])) {
      v = s1[i];
    } else {
      v = s2[j];
    }
    while (i < s1.size() && s1[i] <= v) ++i;
    while (j < s2.size() && s2[j] <= v) ++j;
    dmax = std::max(dmax, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
  }
  return dmax;
}

}  // namespace specboot

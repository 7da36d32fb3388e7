#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "specboot/measure.hpp"

namespace specboot {

enum class CovarianceKind {
  kIdentity,
  kDiagonalTwoPoint,
  kThreeBlock,
  kToeplitzAR,
  kTridiagonalMA,
  kDenseExplicit,
};

/// Declarative description of a population covariance model. Use the
/// factories; validate() checks the parameter ranges.
struct CovarianceSpec {
  CovarianceKind kind = CovarianceKind::kIdentity;
  int p = 0;
  double fraction_at_2 = 0.0;  // DiagonalTwoPoint: fraction of entries equal to 2
  double toeplitz_base = 0.0;  // ToeplitzAR: entries base^|i-j|, |base| < 1
  double rho = 0.0;            // TridiagonalMA: first off-diagonal value, in [0, 0.5]
  int r = 0;                   // TridiagonalMA: number of nonzero off-diagonal entries
  Eigen::MatrixXd dense;       // DenseExplicit

  static CovarianceSpec identity(int p);
  static CovarianceSpec diagonal_two_point(int p, double fraction_at_2);
  /// Diagonal blocks with values (4, 1, 2) and fractions (1/4, 1/2, 1/4).
  static CovarianceSpec three_block(int p);
  static CovarianceSpec toeplitz_ar(int p, double base);
  static CovarianceSpec tridiagonal_ma(int p, double rho, int r);
  static CovarianceSpec dense_explicit(Eigen::MatrixXd sigma);

  void validate() const;
};

/// Innovation distributions; all have mean 0 and variance 1.
enum class InnovationDist {
  kStandardNormal,
  kStandardizedChiSq20,  // (chi^2_20 - 20) / sqrt(40); fourth moment 18/5
  kRademacher,
};

/// n x p observation matrix; row i is the observation Y_i^T.
struct DataMatrix {
  Eigen::MatrixXd values;

  int n() const { return static_cast<int>(values.rows()); }
  int p() const { return static_cast<int>(values.cols()); }

  /// Checks n >= 1, p >= 1 and all entries finite.
  void validate() const;
};

/// MA(1) coefficients with a^2 + b^2 = 1 and a*b = rho:
/// a^2 = (1 + sqrt(1 - 4 rho^2)) / 2, b = rho / a. Requires 0 <= rho <= 0.5.
std::pair<double, double> ma1_coefficients(double rho);

/// The p x p covariance matrix the spec describes.
Eigen::MatrixXd realize_covariance(const CovarianceSpec& spec);

/// n iid rows with population covariance realize_covariance(spec).
/// Diagonal models scale coordinates directly; the tridiagonal MA model uses
/// the moving-average construction with p+1 fresh innovations per row;
/// Toeplitz/dense models apply a symmetric eigendecomposition square root
/// computed once. Row i draws from the stream (seed, kDatagen, i).
DataMatrix generate_sample(const CovarianceSpec& spec, InnovationDist dist, int n,
                           std::uint64_t seed);

/// Spectral measure of the population covariance: exact point masses for the
/// diagonal models, eigendecomposition of the realized matrix otherwise.
DiscreteMeasure population_spectral_measure(const CovarianceSpec& spec);

}  // namespace specboot

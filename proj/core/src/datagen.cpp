#include "specboot/datagen.hpp"

#include <cmath>

#include "specboot/errors.hpp"
#include "specboot/rng.hpp"
#include "specboot/spectra.hpp"

namespace specboot {

namespace {

double draw_innovation(InnovationDist dist, StreamRng& rng) {
  switch (dist) {
    case InnovationDist::kStandardNormal:
      return rng.next_normal();
    case InnovationDist::kStandardizedChiSq20:
      return (rng.next_chisq(20.0) - 20.0) / std::sqrt(40.0);
    case InnovationDist::kRademacher:
      return rng.next_rademacher();
  }
  throw DomainError("unknown innovation distribution");
}

/// Diagonal entries for the diagonal covariance models, in block order.
Eigen::VectorXd diagonal_values(const CovarianceSpec& spec) {
  Eigen::VectorXd d(spec.p);
  switch (spec.kind) {
    case CovarianceKind::kIdentity:
      d.setOnes();
      break;
    case CovarianceKind::kDiagonalTwoPoint: {
      auto k2 = static_cast<Eigen::Index>(std::llround(spec.fraction_at_2 * spec.p));
      d.setOnes();
      d.head(k2).setConstant(2.0);
      break;
    }
    case CovarianceKind::kThreeBlock: {
      auto k4 = static_cast<Eigen::Index>(std::llround(0.25 * spec.p));
      auto k1 = static_cast<Eigen::Index>(std::llround(0.5 * spec.p));
      d.setConstant(2.0);
      d.head(k4).setConstant(4.0);
      d.segment(k4, k1).setConstant(1.0);
      break;
    }
    default:
      throw DomainError("diagonal_values: not a diagonal model");
  }
  return d;
}

/// Symmetric PSD square root by eigendecomposition; tolerates tiny negative
/// eigenvalues from roundoff, rejects genuinely indefinite input.
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma);
  if (solver.info() != Eigen::Success)
    throw NumericalError("symmetric_sqrt: eigendecomposition failed", 0.0);
  Eigen::VectorXd evals = solver.eigenvalues();
  double scale = std::max(std::abs(evals(0)), std::abs(evals(evals.size() - 1)));
  if (evals(0) < -1e-10 * std::max(scale, 1.0))
    throw ModelError("covariance model is not positive semi-definite");
  Eigen::VectorXd root = evals.cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * root.asDiagonal() * solver.eigenvectors().transpose();
}

}  // namespace

CovarianceSpec CovarianceSpec::identity(int p) {
  CovarianceSpec s;
  s.kind = CovarianceKind::kIdentity;
  s.p = p;
  s.validate();
  return s;
}

CovarianceSpec CovarianceSpec::diagonal_two_point(int p, double fraction_at_2) {
  CovarianceSpec s;
  s.kind = CovarianceKind::kDiagonalTwoPoint;
  s.p = p;
  s.fraction_at_2 = fraction_at_2;
  s.validate();
  return s;
}

CovarianceSpec CovarianceSpec::three_block(int p) {
  CovarianceSpec s;
  s.kind = CovarianceKind::kThreeBlock;
  s.p = p;
  s.validate();
  return s;
}

CovarianceSpec CovarianceSpec::toeplitz_ar(int p, double base) {
  CovarianceSpec s;
  s.kind = CovarianceKind::kToeplitzAR;
  s.p = p;
  s.toeplitz_base = base;
  s.validate();
  return s;
}

CovarianceSpec CovarianceSpec::tridiagonal_ma(int p, double rho, int r) {
  CovarianceSpec s;
  s.kind = CovarianceKind::kTridiagonalMA;
  s.p = p;
  s.rho = rho;
  s.r = r;
  s.validate();
  return s;
}

CovarianceSpec CovarianceSpec::dense_explicit(Eigen::MatrixXd sigma) {
  CovarianceSpec s;
  s.kind = CovarianceKind::kDenseExplicit;
  s.p = static_cast<int>(sigma.rows());
  s.dense = std::move(sigma);
  s.validate();
  return s;
}

void CovarianceSpec::validate() const {
  if (p < 1) throw ModelError("CovarianceSpec: p must be >= 1");
  switch (kind) {
    case CovarianceKind::kIdentity:
    case CovarianceKind::kThreeBlock:
      break;
    case CovarianceKind::kDiagonalTwoPoint:
      if (!(fraction_at_2 >= 0.0 && fraction_at_2 <= 1.0))
        throw ModelError("DiagonalTwoPoint: fraction_at_2 must be in [0,1]");
      break;
    case CovarianceKind::kToeplitzAR:
      if (!(std::abs(toeplitz_base) < 1.0))
        throw ModelError("ToeplitzAR: |base| must be < 1");
      break;
    case CovarianceKind::kTridiagonalMA:
      if (!(rho >= 0.0 && rho <= 0.5))
        throw ModelError("TridiagonalMA: rho must be in [0, 0.5]");
      if (r < 0 || r > p - 1)
        throw ModelError("TridiagonalMA: r must be in [0, p-1]");
      break;
    case CovarianceKind::kDenseExplicit: {
      if (dense.rows() != p || dense.cols() != p)
        throw ModelError("DenseExplicit: matrix must be p x p");
      double scale = std::max(1.0, dense.cwiseAbs().maxCoeff());
      if ((dense - dense.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ModelError("DenseExplicit: matrix must be symmetric");
      break;
    }
  }
}

void DataMatrix::validate() const {
  if (values.rows() < 1 || values.cols() < 1)
    throw DomainError("DataMatrix: need n >= 1 and p >= 1");
  if (!values.allFinite()) throw DomainError("DataMatrix: non-finite entries");
}

std::pair<double, double> ma1_coefficients(double rho) {
  if (!(rho >= 0.0 && rho <= 0.5))
    throw DomainError("ma1_coefficients: rho must be in [0, 0.5]");
  double disc = 1.0 - 4.0 * rho * rho;
  double a = std::sqrt((1.0 + std::sqrt(disc)) / 2.0);
  double b = rho / a;
  return {a, b};
}

Eigen::MatrixXd realize_covariance(const CovarianceSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case CovarianceKind::kIdentity:
    case CovarianceKind::kDiagonalTwoPoint:
    case CovarianceKind::kThreeBlock:
      return diagonal_values(spec).asDiagonal();
    case CovarianceKind::kToeplitzAR: {
      Eigen::MatrixXd sigma(spec.p, spec.p);
      for (int i = 0; i < spec.p; ++i)
        for (int j = 0; j < spec.p; ++j)
          sigma(i, j) = std::pow(spec.toeplitz_base, std::abs(i - j));
      return sigma;
    }
    case CovarianceKind::kTridiagonalMA: {
      Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(spec.p, spec.p);
      for (int j = 0; j < spec.r; ++j) {
        sigma(j, j + 1) = spec.rho;
        sigma(j + 1, j) = spec.rho;
      }
      return sigma;
    }
    case CovarianceKind::kDenseExplicit:
      return spec.dense;
  }
  throw ModelError("realize_covariance: unknown model kind");
}

DataMatrix generate_sample(const CovarianceSpec& spec, InnovationDist dist, int n,
                           std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw DomainError("generate_sample: n must be >= 1");
  const int p = spec.p;
  DataMatrix data;
  data.values.resize(n, p);

  switch (spec.kind) {
    case CovarianceKind::kIdentity:
    case CovarianceKind::kDiagonalTwoPoint:
    case CovarianceKind::kThreeBlock: {
      Eigen::VectorXd scale = diagonal_values(spec).cwiseSqrt();
      for (int i = 0; i < n; ++i) {
        StreamRng rng(derive_stream(seed, StreamTag::kDatagen, static_cast<std::uint64_t>(i)));
        for (int j = 0; j < p; ++j) data.values(i, j) = scale(j) * draw_innovation(dist, rng);
      }
      break;
    }
    case CovarianceKind::kTridiagonalMA: {
      auto [a, b] = ma1_coefficients(spec.rho);
      // Coordinates 1..r+1 are the moving-average window, so that exactly r
      // first-off-diagonal covariances equal rho = a*b.
      const int ma_cols = spec.r == 0 ? 0 : spec.r + 1;
      std::vector<double> x(static_cast<std::size_t>(p) + 1);
      for (int i = 0; i < n; ++i) {
        StreamRng rng(derive_stream(seed, StreamTag::kDatagen, static_cast<std::uint64_t>(i)));
        for (auto& v : x) v = draw_innovation(dist, rng);
        for (int j = 0; j < p; ++j) {
          data.values(i, j) = j < ma_cols ? a * x[j + 1] + b * x[j] : x[j + 1];
        }
      }
      break;
    }
    case CovarianceKind::kToeplitzAR:
    case CovarianceKind::kDenseExplicit: {
      Eigen::MatrixXd root = symmetric_sqrt(realize_covariance(spec));
      Eigen::VectorXd x(p);
      for (int i = 0; i < n; ++i) {
        StreamRng rng(derive_stream(seed, StreamTag::kDatagen, static_cast<std::uint64_t>(i)));
        for (int j = 0; j < p; ++j) x(j) = draw_innovation(dist, rng);
        data.values.row(i) = (root * x).transpose();
      }
      break;
    }
  }
  return data;
}

DiscreteMeasure population_spectral_measure(const CovarianceSpec& spec) {
  spec.validate();
  const double p = spec.p;
  switch (spec.kind) {
    case CovarianceKind::kIdentity:
      return DiscreteMeasure::dirac(1.0);
    case CovarianceKind::kDiagonalTwoPoint: {
      double k2 = std::llround(spec.fraction_at_2 * spec.p);
      return DiscreteMeasure({1.0, 2.0}, {(p - k2) / p, k2 / p});
    }
    case CovarianceKind::kThreeBlock: {
      double k4 = std::llround(0.25 * spec.p);
      double k1 = std::llround(0.5 * spec.p);
      double k2 = p - k4 - k1;
      return DiscreteMeasure({1.0, 2.0, 4.0}, {k1 / p, k2 / p, k4 / p});
    }
    case CovarianceKind::kToeplitzAR:
    case CovarianceKind::kTridiagonalMA:
    case CovarianceKind::kDenseExplicit:
      return empirical_spectral_measure(eigenvalues_sym(realize_covariance(spec)));
  }
  throw ModelError("population_spectral_measure: unknown model kind");
}

}  // namespace specboot

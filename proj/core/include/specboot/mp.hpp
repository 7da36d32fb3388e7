#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "specboot/measure.hpp"
#include "specboot/spectra.hpp"

namespace specboot {

/// Aspect ratio gamma (p/n or its limit c) together with the limiting
/// population spectral distribution H. Carrier for all MP-equation work.
struct MPModel {
  double gamma = 0.0;
  DiscreteMeasure H;

  MPModel() = default;
  MPModel(double gamma_, DiscreteMeasure H_) : gamma(gamma_), H(std::move(H_)) { validate(); }

  void validate() const;
};

struct MPSolveOptions {
  double tol = 1e-12;
  int max_iter = 10000;
};

/// Stieltjes transform m(z) of the MP law: the unique solution in C+ of
///   m = int dH(t) / (t (1 - gamma - gamma z m) - z),   Im z > 0.
/// Damped fixed-point iteration from m0 = -1/z; the step is halved whenever
/// the residual would grow. Throws NumericalError on non-convergence.
std::complex<double> solve_mp_stieltjes(const MPModel& model, std::complex<double> z,
                                        const MPSolveOptions& opts = {});

/// Companion transform: the unique solution in C+ of
///   m = -( z - gamma int t / (1 + t m) dG(t) )^{-1}
/// with G = model.H. Related to solve_mp_stieltjes by
/// m(z) = -(1-gamma)/z + gamma m0(z); solved here on its own fixed point.
std::complex<double> underline_m(const MPModel& model, std::complex<double> z,
                                 const MPSolveOptions& opts = {});

/// Stieltjes inversion Im m(x + i eps) / pi, clamped at 0.
double mp_density(const MPModel& model, double x, double eps, const MPSolveOptions& opts = {});

/// Support [(1-sqrt(c))^2, (1+sqrt(c))^2] of the MP law for H = delta_1.
std::pair<double, double> mp_support_identity(double c);

/// Mass of the MP law at 0: clamp(1 - (1 - H({0})) / gamma, 0, 1).
double mp_atom_at_zero(const MPModel& model);

/// Raw moments of the MP law up to max_degree, expressed through gamma and
/// the moments of H (moment(0) = 1).
std::vector<double> mp_moments(const MPModel& model, int max_degree);

/// p * int f dmu0_{gamma,H} for polynomial f via the moment recursion.
/// Degrees above 6 raise CapabilityError.
double lss_centering(const MPModel& model, const SpectralFunction& f, long long p_dim);

/// Rectangular contour around a spectral support, traversed counterclockwise.
struct ContourSpec {
  double x_min = 0.0;
  double x_max = 0.0;
  double half_height = 0.25;
  int nodes_per_side = 512;

  static ContourSpec around(const DiscreteMeasure& esd, double margin = 0.5,
                            double half_height = 0.25, int nodes_per_side = 512);

  /// Contour for companion-transform integrands: the right side is pushed to
  /// max_point * (1 + sqrt(gamma))^2 + margin so the band of real
  /// denominator zeros (the broadened spectral edge) lies strictly inside,
  /// making the integral insensitive to further enlargement.
  static ContourSpec around_mp(const DiscreteMeasure& esd, double gamma, double margin = 0.5,
                               double half_height = 0.25, int nodes_per_side = 512);
};

/// Data-driven bias term
///   d_n(f) = -(1/2 pi i) oint f(z) N(z) / D(z)^2 dz,
///   N(z) = gamma int m(z)^3 t^2 (1 + t m(z))^{-3} d esd(t),
///   D(z) = 1 - gamma int m(z)^2 t^2 (1 + t m(z))^{-2} d esd(t),
/// with m(z) = -(1-gamma)/z + gamma m_esd(z), the companion transform of the
/// empirical measure. The contour must strictly enclose supp(esd). Computed
/// by trapezoidal quadrature on the upper half contour with the real part
/// doubled (conjugate symmetry).
double bias_correction_dn(const DiscreteMeasure& esd, double gamma, const SpectralFunction& f,
                          const ContourSpec& contour);

}  // namespace specboot

#include "specboot/mp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "specboot/errors.hpp"

namespace specboot {

namespace {

using Complex = std::complex<double>;

/// Damped Picard iteration m <- (1-theta) m + theta map(m), starting at -1/z
/// with theta = 1; theta is halved after a material residual increase and
/// recovers geometrically. Each cycle first attempts Newton steps on
/// m - map(m) = 0 (plain and doubled, for the near-double roots at support
/// edges), accepted only when they strictly reduce the residual and satisfy
/// the branch predicate. Newton covers the near-neutral regimes close to the
/// support where plain iteration contracts like 1 - O(sqrt(Im z)); the
/// damped Picard base keeps global progress. A converged iterate that fails
/// the branch predicate is reported as an error so callers can reroute.
Complex damped_fixed_point(const std::function<Complex(Complex)>& map,
                           const std::function<Complex(Complex)>& map_derivative,
                           const std::function<bool(Complex)>& valid, Complex z,
                           const MPSolveOptions& opts, const char* what) {
  if (!(z.imag() > 0.0)) throw DomainError(std::string(what) + ": Im z must be > 0");
  if (!(opts.tol > 0.0)) throw DomainError(std::string(what) + ": tol must be > 0");
  constexpr double kMinStep = 1.0 / 64.0;
  Complex m = -1.0 / z;
  Complex image = map(m);
  double residual = std::abs(m - image);
  double step = 1.0;
  int evals = 1;
  while (evals < opts.max_iter) {
    if (residual < opts.tol) {
      if (valid(m)) return m;
      throw NumericalError(std::string(what) + ": converged to an invalid branch", residual);
    }

    if (evals + 3 < opts.max_iter) {
      Complex denom = 1.0 - map_derivative(m);
      ++evals;
      if (std::abs(denom) > 1e-300) {
        Complex newton = (m - image) / denom;
        bool improved = false;
        for (double scale : {1.0, 2.0}) {
          Complex trial = m - scale * newton;
          if (!std::isfinite(trial.real()) || !std::isfinite(trial.imag())) continue;
          if (!valid(trial)) continue;
          Complex trial_image = map(trial);
          ++evals;
          double trial_residual = std::abs(trial - trial_image);
          if (trial_residual < residual) {
            m = trial;
            image = trial_image;
            residual = trial_residual;
            improved = true;
            break;
          }
        }
        if (improved) continue;
      }
    }

    m = (1.0 - step) * m + step * image;
    image = map(m);
    ++evals;
    double next_residual = std::abs(m - image);
    step = next_residual > 1.05 * residual ? std::max(kMinStep, 0.5 * step)
                                           : std::min(1.0, 1.3 * step);
    residual = next_residual;
  }
  if (residual < opts.tol && valid(m)) return m;
  throw NumericalError(std::string(what) + ": fixed point did not converge", residual);
}

}  // namespace

void MPModel::validate() const {
  if (!(gamma > 0.0)) throw DomainError("MPModel: gamma must be > 0");
  if (!H.is_probability(1e-9)) throw DomainError("MPModel: H must be a probability measure");
  if (H.min_point() < 0.0) throw DomainError("MPModel: H must be supported on [0, inf)");
}

std::complex<double> solve_mp_stieltjes(const MPModel& model, std::complex<double> z,
                                        const MPSolveOptions& opts) {
  model.validate();
  const auto& pts = model.H.points();
  const auto& wts = model.H.weights();
  const double gamma = model.gamma;
  auto map = [&](Complex m) {
    Complex shift = 1.0 - gamma - gamma * z * m;
    Complex acc = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) acc += wts[i] / (pts[i] * shift - z);
    return acc;
  };
  auto map_derivative = [&](Complex m) {
    Complex shift = 1.0 - gamma - gamma * z * m;
    Complex acc = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      Complex den = pts[i] * shift - z;
      acc += wts[i] * pts[i] / (den * den);
    }
    return gamma * z * acc;
  };

  // Branch test: the true solution's companion image -(1-gamma)/z + gamma m
  // is itself a Stieltjes transform, so it must lie in C+. The companion map
  // has a unique fixed point in C+ (Schwarz-Pick), which makes this the
  // reliable discriminator between the equation's roots.
  auto valid = [&](Complex m) {
    if (!(m.imag() > 0.0)) return false;
    Complex u = -(1.0 - gamma) / z + gamma * m;
    return u.imag() > 0.0;
  };

  // The direct iteration is not a C+ self-map and can settle on the conjugate
  // root (seen for gamma > 1). Fall back to the companion-variable iteration,
  // which maps C+ into itself, and transform back through the exact relation;
  // the returned value must still satisfy the original equation.
  Complex m;
  bool need_fallback = false;
  try {
    m = damped_fixed_point(map, map_derivative, valid, z, opts, "solve_mp_stieltjes");
    need_fallback = false;
  } catch (const NumericalError&) {
    need_fallback = true;
  }
  if (need_fallback) {
    auto companion_map = [&](Complex u) {
      Complex acc = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i)
        acc += wts[i] * pts[i] / (1.0 + pts[i] * u);
      return -1.0 / (z - gamma * acc);
    };
    auto companion_derivative = [&](Complex u) {
      Complex acc = 0.0;
      Complex sum = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        Complex den = 1.0 + pts[i] * u;
        sum += wts[i] * pts[i] / den;
        acc += wts[i] * pts[i] * pts[i] / (den * den);
      }
      Complex value = -1.0 / (z - gamma * sum);
      return gamma * acc * value * value;
    };
    MPSolveOptions tight = opts;
    tight.tol = std::max(opts.tol * std::min(1.0, gamma) * 0.25, 1e-14);
    auto in_upper_half = [](Complex u) { return u.imag() > 0.0; };
    Complex u = damped_fixed_point(companion_map, companion_derivative, in_upper_half, z,
                                   tight, "solve_mp_stieltjes");
    m = (u + (1.0 - gamma) / z) / gamma;
    double residual = std::abs(m - map(m));
    // |m| blows up like atom/|z| near a point mass, where an absolute 1e-12
    // residual would sit below machine precision; scale the check accordingly.
    if (!(residual < opts.tol * std::max(1.0, std::abs(m))))
      throw NumericalError("solve_mp_stieltjes: companion route residual too large", residual);
  }
  return m;
}

std::complex<double> underline_m(const MPModel& model, std::complex<double> z,
                                 const MPSolveOptions& opts) {
  model.validate();
  const auto& pts = model.H.points();
  const auto& wts = model.H.weights();
  const double gamma = model.gamma;
  auto map = [&](Complex m) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) acc += wts[i] * pts[i] / (1.0 + pts[i] * m);
    return -1.0 / (z - gamma * acc);
  };
  auto map_derivative = [&](Complex m) {
    Complex acc = 0.0;
    Complex sum = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      Complex den = 1.0 + pts[i] * m;
      sum += wts[i] * pts[i] / den;
      acc += wts[i] * pts[i] * pts[i] / (den * den);
    }
    Complex value = -1.0 / (z - gamma * sum);
    return gamma * acc * value * value;
  };
  auto in_upper_half = [](Complex u) { return u.imag() > 0.0; };
  return damped_fixed_point(map, map_derivative, in_upper_half, z, opts, "underline_m");
}

double mp_density(const MPModel& model, double x, double eps, const MPSolveOptions& opts) {
  if (!(eps > 0.0)) throw DomainError("mp_density: eps must be > 0");
  Complex m = solve_mp_stieltjes(model, Complex(x, eps), opts);
  return std::max(0.0, m.imag() / M_PI);
}

std::pair<double, double> mp_support_identity(double c) {
  if (!(c > 0.0)) throw DomainError("mp_support_identity: c must be > 0");
  double s = std::sqrt(c);
  return {(1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s)};
}

double mp_atom_at_zero(const MPModel& model) {
  model.validate();
  double h0 = model.H.mass_at(0.0);
  return std::clamp(1.0 - (1.0 - h0) / model.gamma, 0.0, 1.0);
}

std::vector<double> mp_moments(const MPModel& model, int max_degree) {
  model.validate();
  if (max_degree < 0) throw DomainError("mp_moments: negative degree");
  std::vector<double> beta(static_cast<std::size_t>(max_degree) + 1);
  for (int j = 0; j <= max_degree; ++j) beta[static_cast<std::size_t>(j)] = model.H.moment(j);

  std::vector<double> factorial(static_cast<std::size_t>(max_degree) + 2, 1.0);
  for (std::size_t i = 1; i < factorial.size(); ++i)
    factorial[i] = factorial[i - 1] * static_cast<double>(i);

  // Moment of order k: sum over (i_1..i_k) >= 0 with sum_j j*i_j = k of
  //   k! / (i_1! ... i_k! (k+1-s)!) gamma^{s-1} prod_j beta_j^{i_j},
  // where s = sum_j i_j.
  std::vector<double> alpha(static_cast<std::size_t>(max_degree) + 1, 0.0);
  alpha[0] = 1.0;
  for (int k = 1; k <= max_degree; ++k) {
    double total = 0.0;
    // DFS over part sizes j = k..1, tracking remaining weight, multiplicity
    // factor prod i_j!, count s and the beta product.
    std::function<void(int, int, int, double, double)> visit =
        [&](int j, int remaining, int s, double fact_prod, double beta_prod) {
          if (remaining == 0) {
            double term = factorial[static_cast<std::size_t>(k)] /
                          (fact_prod * factorial[static_cast<std::size_t>(k + 1 - s)]) *
                          std::pow(model.gamma, s - 1) * beta_prod;
            total += term;
            return;
          }
          if (j == 0) return;
          double fp = fact_prod;
          double bp = beta_prod;
          for (int count = 0; count * j <= remaining; ++count) {
            if (count > 0) {
              fp *= static_cast<double>(count);
              bp *= beta[static_cast<std::size_t>(j)];
            }
            visit(j - 1, remaining - count * j, s + count, fp, bp);
          }
        };
    visit(k, k, 0, 1.0, 1.0);
    alpha[static_cast<std::size_t>(k)] = total;
  }
  return alpha;
}

double lss_centering(const MPModel& model, const SpectralFunction& f, long long p_dim) {
  constexpr int kMaxDegree = 6;
  if (f.degree() > kMaxDegree)
    throw CapabilityError("lss_centering: polynomial degree above supported depth 6");
  if (p_dim < 1) throw DomainError("lss_centering: p must be >= 1");
  std::vector<double> alpha = mp_moments(model, f.degree());
  double integral = 0.0;
  for (int k = 0; k <= f.degree(); ++k)
    integral += f.coeffs()[static_cast<std::size_t>(k)] * alpha[static_cast<std::size_t>(k)];
  return static_cast<double>(p_dim) * integral;
}

ContourSpec ContourSpec::around(const DiscreteMeasure& esd, double margin, double half_height,
                                int nodes_per_side) {
  ContourSpec spec;
  spec.x_min = esd.min_point() - margin;
  spec.x_max = esd.max_point() + margin;
  spec.half_height = half_height;
  spec.nodes_per_side = nodes_per_side;
  return spec;
}

ContourSpec ContourSpec::around_mp(const DiscreteMeasure& esd, double gamma, double margin,
                                   double half_height, int nodes_per_side) {
  if (!(gamma > 0.0)) throw DomainError("ContourSpec::around_mp: gamma must be > 0");
  ContourSpec spec;
  double root = std::sqrt(gamma);
  spec.x_min = std::min(0.0, esd.min_point()) - margin;
  spec.x_max = esd.max_point() * (1.0 + root) * (1.0 + root) + margin;
  spec.half_height = half_height;
  spec.nodes_per_side = nodes_per_side;
  return spec;
}

double bias_correction_dn(const DiscreteMeasure& esd, double gamma, const SpectralFunction& f,
                          const ContourSpec& contour) {
  if (esd.empty()) throw DomainError("bias_correction_dn: empty spectral measure");
  if (!(contour.half_height > 0.0))
    throw DomainError("bias_correction_dn: contour must have positive height");
  if (contour.nodes_per_side < 2)
    throw DomainError("bias_correction_dn: need at least 2 nodes per side");
  if (!(contour.x_min < esd.min_point() && contour.x_max > esd.max_point()))
    throw DomainError("bias_correction_dn: contour intersects the spectral support");

  const auto& pts = esd.points();
  const auto& wts = esd.weights();

  // m(z) is the companion transform of the empirical measure itself,
  //   m(z) = -(1-gamma)/z + gamma int (t-z)^{-1} d esd(t),
  // whose poles all lie in {0} union supp(esd), inside the contour. Using the
  // MP-equation solution here instead would push the branch cut past the
  // contour and make the integral contour-dependent.
  auto integrand = [&](Complex z) {
    Complex m = -(1.0 - gamma) / z + gamma * stieltjes_transform(esd, z);
    Complex num = 0.0;
    Complex den = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double t2 = pts[i] * pts[i];
      Complex base = 1.0 + pts[i] * m;
      num += wts[i] * m * m * m * t2 / (base * base * base);
      den += wts[i] * m * m * t2 / (base * base);
    }
    Complex d = 1.0 - gamma * den;
    return f(z) * gamma * num / (d * d);
  };

  // Upper half of the counterclockwise rectangle: up the right side, across
  // the top, down the left side. Vertical legs start a hair above the axis;
  // the integrand is analytic there, so the clipped sliver is negligible.
  const double h = contour.half_height;
  const double base_im = std::min(1e-6, h * 1e-3);
  const int nodes = contour.nodes_per_side;

  auto trapezoid = [&](Complex a, Complex b) {
    Complex dz = (b - a) / static_cast<double>(nodes);
    Complex acc = 0.5 * (integrand(a) + integrand(b));
    for (int k = 1; k < nodes; ++k) acc += integrand(a + static_cast<double>(k) * dz);
    return acc * dz;
  };

  Complex upper = trapezoid(Complex(contour.x_max, base_im), Complex(contour.x_max, h)) +
                  trapezoid(Complex(contour.x_max, h), Complex(contour.x_min, h)) +
                  trapezoid(Complex(contour.x_min, h), Complex(contour.x_min, base_im));

  // Full integral is 2i Im(upper) by conjugate symmetry, and
  // d_n = -(1/2 pi i) * integral = -Im(upper) / pi.
  return -upper.imag() / M_PI;
}

}  // namespace specboot

#pragma once

#include <stdexcept>
#include <string>

namespace specboot {

/// Argument outside a function's documented domain (bad rho, alpha, q > p, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A covariance model that cannot be realized (e.g. a non-PSD dense matrix).
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input violates a documented structural contract (e.g. non-symmetric matrix).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested computation beyond a documented capability limit.
class CapabilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative routine failed to converge; carries the last residual seen.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what + " (last residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace specboot

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace hybrid {

// Argument outside the mathematical domain of a kernel (coincident points,
// zero radicand, unflagged point on a branch cut, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A junction parameter set that fails an admissibility check.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string what, std::string offending)
      : std::invalid_argument(std::move(what)), offending_(std::move(offending)) {}

  const std::string& offending() const noexcept { return offending_; }

 private:
  std::string offending_;
};

// The Krein denominator Q(z) - Ã is numerically singular at the requested z.
class SpectralPointError : public std::runtime_error {
 public:
  SpectralPointError(const std::string& what, std::complex<double> det, double condition)
      : std::runtime_error(what), determinant_(det), condition_(condition) {}

  std::complex<double> determinant() const noexcept { return determinant_; }
  double condition() const noexcept { return condition_; }

 private:
  std::complex<double> determinant_;
  double condition_;
};

// An extrapolation that did not settle within tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// A binding parameter for which the renormalized Green's function is not
// real, i.e. the energy sits inside the essential spectrum.
class RegionError : public std::domain_error {
 public:
  RegionError(const std::string& what, double imag_part)
      : std::domain_error(what), imag_part_(imag_part) {}

  double imag_part() const noexcept { return imag_part_; }

 private:
  double imag_part_;
};

}  // namespace hybrid

#pragma once

#include <complex>
#include <utility>

namespace hybrid {

using Complex = std::complex<double>;

/// Whether a real spectral parameter is understood as a boundary value
/// from the upper half-plane (limiting absorption).
enum class Boundary { none, from_above };

/// Complex energy together with the limiting-absorption flag.
///
/// A real z that lies on the branch cut of a kernel must carry
/// Boundary::from_above; kernels reject unflagged points on their cut.
struct SpectralPoint {
  Complex z;
  Boundary boundary = Boundary::none;

  static SpectralPoint at(Complex z) { return {z, Boundary::none}; }
  static SpectralPoint above(double energy) { return {Complex(energy, 0.0), Boundary::from_above}; }

  bool is_real() const { return z.imag() == 0.0; }

  // z + delta with the flag carried over.
  SpectralPoint shifted(double delta) const { return {z + delta, boundary}; }

  // Complex conjugate. Only meaningful off the real axis.
  SpectralPoint conjugate() const { return {std::conj(z), Boundary::none}; }
};

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Root w of w^2 = -z with Re w >= 0. On the cut (z real and positive) the
/// limit from Im z > 0 is taken, which gives -i sqrt(E); an unflagged real
/// positive z throws DomainError.
Complex sqrt_minus(const SpectralPoint& z);

/// MacDonald function K_order(w), order 0 or 1, for Re w >= 0, w != 0.
/// Purely imaginary w is the continuation from the right half-plane.
Complex macdonald_k(int order, Complex w);

/// K0(w) and K1(w) from a single evaluation.
std::pair<Complex, Complex> macdonald_k01(Complex w);

/// psi(1) = -gamma.
constexpr double digamma_one() { return -kEulerGamma; }

}  // namespace hybrid

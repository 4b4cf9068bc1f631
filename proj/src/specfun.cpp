#include "hybrid/specfun.hpp"

#include <cmath>
#include <stdexcept>

#include "hybrid/errors.hpp"

namespace hybrid {

namespace {

constexpr double kSeriesRadius = 2.0;

// Ascending series, |w| <= 2:
//   K0 = -(ln(w/2) + gamma) I0(w) + sum_k H_k y^k / (k!)^2
//   K1 = 1/w + (w/2) sum_k y^k / (k!(k+1)!) [ln(w/2) + gamma - (H_k + H_{k+1})/2]
// with y = w^2/4 and H_k the harmonic numbers.
std::pair<Complex, Complex> k01_series(Complex w) {
  const Complex y = 0.25 * w * w;
  const Complex log_term = std::log(0.5 * w) + kEulerGamma;

  Complex t0 = 1.0;  // y^k / (k!)^2
  Complex t1 = 1.0;  // y^k / (k!(k+1)!)
  double h_k = 0.0;
  Complex sum0 = -log_term;
  Complex sum1 = log_term - 0.5;  // H_0 + H_1 = 1
  for (int k = 1; k < 80; ++k) {
    t0 *= y / double(k * k);
    t1 *= y / double(k * (k + 1));
    h_k += 1.0 / k;
    const double h_next = h_k + 1.0 / (k + 1);
    const Complex d0 = t0 * (h_k - log_term);
    const Complex d1 = t1 * (log_term - 0.5 * (h_k + h_next));
    sum0 += d0;
    sum1 += d1;
    if (std::abs(d0) <= 1e-17 * std::abs(sum0) && std::abs(d1) <= 1e-17 * std::abs(sum1)) break;
  }
  return {sum0, 1.0 / w + 0.5 * w * sum1};
}

// For |w| > 2 use
//   K_nu(w) = sqrt(pi/2w) e^{-w} / Gamma(nu+1/2)
//             * int_R s^{2 nu} e^{-s^2} (1 + s^2/(2w))^{nu-1/2} ds,
// valid for Re w >= 0. The integrand is analytic in a strip of half-width
// at least sqrt(|w|) around the real axis, so the trapezoidal rule converges
// geometrically; h = 1/8 leaves the discretisation error far below 1e-16.
std::pair<Complex, Complex> k01_quadrature(Complex w) {
  constexpr double h = 0.125;
  constexpr int n = 56;  // s_max = 7, e^{-49} truncation
  const Complex inv2w = 0.5 / w;
  Complex int0 = 1.0;  // s = 0 contributions
  Complex int1 = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double s = j * h;
    const double s2 = s * s;
    const double g = std::exp(-s2);
    const Complex root = std::sqrt(1.0 + s2 * inv2w);
    int0 += 2.0 * g / root;
    int1 += 2.0 * g * s2 * root;
  }
  int0 *= h;
  int1 *= h;
  const Complex pre = std::sqrt(0.5 * kPi / w) * std::exp(-w) / std::sqrt(kPi);
  return {pre * int0, 2.0 * pre * int1};
}

}  // namespace

Complex sqrt_minus(const SpectralPoint& point) {
  const Complex z = point.z;
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError("sqrt_minus: non-finite spectral parameter");
  }
  if (z.imag() == 0.0) {
    if (z.real() <= 0.0) return {std::sqrt(-z.real()), 0.0};
    if (point.boundary != Boundary::from_above) {
      throw DomainError("sqrt_minus: real positive argument requires the limiting-absorption flag");
    }
    return {0.0, -std::sqrt(z.real())};
  }
  return std::sqrt(-z);
}

std::pair<Complex, Complex> macdonald_k01(Complex w) {
  const double r = std::abs(w);
  if (r == 0.0) throw DomainError("macdonald_k: logarithmic singularity at w = 0");
  if (!std::isfinite(r)) throw DomainError("macdonald_k: non-finite argument");
  if (w.real() < -1e-14 * r) throw DomainError("macdonald_k: argument outside Re w >= 0");
  if (w.real() < 0.0) w = Complex(0.0, w.imag());
  return r <= kSeriesRadius ? k01_series(w) : k01_quadrature(w);
}

Complex macdonald_k(int order, Complex w) {
  if (order != 0 && order != 1) throw std::invalid_argument("macdonald_k: order must be 0 or 1");
  const auto [k0, k1] = macdonald_k01(w);
  return order == 0 ? k0 : k1;
}

}  // namespace hybrid

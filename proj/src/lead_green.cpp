#include "hybrid/lead_green.hpp"

#include <algorithm>
#include <cmath>

#include "hybrid/errors.hpp"

namespace hybrid {

namespace {

constexpr Complex kI(0.0, 1.0);

void require_on_lead(const LeadPoint& p) {
  if (!std::isfinite(p.x) || p.x < 0.0) throw DomainError("lead point must be finite and >= 0");
}

}  // namespace

Complex lead_momentum(const SpectralPoint& z) { return kI * sqrt_minus(z); }

Complex lead_green(const LeadPoint& x, const LeadPoint& x_prime, const SpectralPoint& z) {
  require_on_lead(x);
  require_on_lead(x_prime);
  const Complex k = lead_momentum(z);
  if (k == 0.0) throw DomainError("lead_green: z = 0 is a spectral threshold");
  const double lo = std::min(x.x, x_prime.x);
  const double hi = std::max(x.x, x_prime.x);
  // cos(k lo) e^{i k hi} written as two exponentials with Im(exponent) >= 0,
  // so nothing overflows for large coordinates.
  const Complex wave = 0.5 * (std::exp(kI * k * (hi + lo)) + std::exp(kI * k * (hi - lo)));
  return kI / k * wave;
}

Complex lead_diagonal(const SpectralPoint& z) {
  const Complex k = lead_momentum(z);
  if (k == 0.0) throw DomainError("lead_diagonal: z = 0");
  return kI / k;
}

}  // namespace hybrid

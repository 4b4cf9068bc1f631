#pragma once

#include "hybrid/specfun.hpp"

namespace hybrid {

/// Coordinate on the halfline lead, x >= 0.
struct LeadPoint {
  double x = 0.0;
};

/// sqrt(z) on the lead, defined as i * sqrt_minus(z) so that Im >= 0.
Complex lead_momentum(const SpectralPoint& z);

/// Neumann Green's function of -d^2/dx^2 on the halfline:
///   (i/sqrt z) cos(sqrt z x<) exp(i sqrt z x>).
/// The spin structure is this scalar times sigma_0.
Complex lead_green(const LeadPoint& x, const LeadPoint& x_prime, const SpectralPoint& z);

/// Junction value i/sqrt(z) = lead_green(0, 0, z).
Complex lead_diagonal(const SpectralPoint& z);

}  // namespace hybrid

#pragma once

#include <vector>

#include "hybrid/specfun.hpp"
#include "hybrid/spin.hpp"

namespace hybrid {

enum class SpinOrbitKind { rashba, dresselhaus };

/// Interaction kind and dimensionless strength kappa >= 0.
///
/// A negative strength is equivalent to a positive one up to a unitary spin
/// rotation (sigma_3 conjugation flips the sign of both U_R and U_D), so the
/// constructor stores |kappa|.
class SpinOrbitParams {
 public:
  SpinOrbitParams() = default;
  SpinOrbitParams(SpinOrbitKind kind, double kappa);

  SpinOrbitKind kind() const { return kind_; }
  double kappa() const { return kappa_; }

 private:
  SpinOrbitKind kind_ = SpinOrbitKind::rashba;
  double kappa_ = 0.0;
};

struct PlanePoint {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// zeta_pm = sqrt(-(z + kappa^2)) +- i kappa. `root` keeps the common
/// square root so callers never have to re-derive it from the difference.
struct EffectiveMomenta {
  Complex zeta_plus;
  Complex zeta_minus;
  Complex root;
};

EffectiveMomenta effective_momenta(const SpectralPoint& z, const SpinOrbitParams& p);

/// Scalar resolvent kernel of the plane Laplacian, K0(sqrt(-z)|x-x'|)/2pi.
Complex free_green(const PlanePoint& x, const PlanePoint& x_prime, const SpectralPoint& z);

/// The 2x2 resolvent kernel G_J(x, x'; z) of H_J = H_0 + 2 kappa U_J.
SpinMatrix2 spin_orbit_green(const PlanePoint& x, const PlanePoint& x_prime, const SpectralPoint& z,
                             const SpinOrbitParams& p);

/// (psi(1) - ln(-z)/2 + ln 2) / 2pi, with ln(-z) = 2 ln sqrt_minus(z).
Complex q_helper(const SpectralPoint& z);

/// Scalar part g of the renormalized Green's function G^ren = g sigma_0.
Complex renormalized_green_scalar(const SpectralPoint& z, const SpinOrbitParams& p);

/// Closed form of the renormalized Green's function; off-diagonal entries are zero.
SpinMatrix2 renormalized_green(const SpectralPoint& z, const SpinOrbitParams& p);

struct RenormalizationOracleOptions {
  PlanePoint base{0.0, 0.0};
  PlanePoint direction{1.0, 0.0};
  // Decreasing radii. Empty selects r0 * 2^-k, k = 0..24, with r0 scaled to
  // the largest effective momentum.
  std::vector<double> radii;
  double tolerance = 1e-8;
};

struct RenormalizationOracleResult {
  SpinMatrix2 value;
  double residual = 0.0;  // last successive difference of the extrapolants
  int radii_used = 0;
};

/// Independent route to G^ren: Richardson extrapolation of
/// G_J(x, x + r e) + ln(r)/2pi over shrinking r. Each sample averages the
/// directions +e and -e, which removes the O(r ln r) odd off-diagonal terms
/// exactly. Throws ConvergenceError if successive extrapolants never agree
/// to the tolerance.
RenormalizationOracleResult renormalized_green_oracle(const SpectralPoint& z, const SpinOrbitParams& p,
                                                      const RenormalizationOracleOptions& options = {});

}  // namespace hybrid

#include "hybrid/plane_green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hybrid/errors.hpp"

namespace hybrid {

namespace {

constexpr Complex kI(0.0, 1.0);
constexpr double kLn2 = 0.69314718055994530941723212145817657;

double distance(const PlanePoint& a, const PlanePoint& b) { return std::hypot(a.x1 - b.x1, a.x2 - b.x2); }

void require_finite(const PlanePoint& p) {
  if (!std::isfinite(p.x1) || !std::isfinite(p.x2)) throw DomainError("plane point is not finite");
}

}  // namespace

SpinOrbitParams::SpinOrbitParams(SpinOrbitKind kind, double kappa) : kind_(kind), kappa_(std::abs(kappa)) {
  if (!std::isfinite(kappa)) throw std::invalid_argument("spin-orbit strength must be finite");
}

EffectiveMomenta effective_momenta(const SpectralPoint& z, const SpinOrbitParams& p) {
  const double kappa = p.kappa();
  const Complex root = sqrt_minus(z.shifted(kappa * kappa));
  return {root + kI * kappa, root - kI * kappa, root};
}

Complex free_green(const PlanePoint& x, const PlanePoint& x_prime, const SpectralPoint& z) {
  require_finite(x);
  require_finite(x_prime);
  const double r = distance(x, x_prime);
  if (r == 0.0) throw DomainError("free_green: coincident points");
  return macdonald_k(0, sqrt_minus(z) * r) / (2.0 * kPi);
}

SpinMatrix2 spin_orbit_green(const PlanePoint& x, const PlanePoint& x_prime, const SpectralPoint& z,
                             const SpinOrbitParams& p) {
  require_finite(x);
  require_finite(x_prime);
  const double dx1 = x.x1 - x_prime.x1;
  const double dx2 = x.x2 - x_prime.x2;
  const double r = std::hypot(dx1, dx2);
  if (r == 0.0) throw DomainError("spin_orbit_green: coincident points");

  const auto m = effective_momenta(z, p);
  if (m.root == 0.0) throw DomainError("spin_orbit_green: z + kappa^2 = 0 is a spectral threshold");

  const double kappa = p.kappa();
  const auto [k0p, k1p] = macdonald_k01(m.zeta_plus * r);
  const auto [k0m, k1m] = macdonald_k01(m.zeta_minus * r);

  const Complex is = kI * m.root;
  const Complex diag = (-(kappa / is) * (k0p - k0m) + k0p + k0m) / (4.0 * kPi);

  // sum_{nu=+-} nu zeta^nu K1(zeta^nu r) over the common denominator 4 pi i s r
  const Complex mix = (m.zeta_plus * k1p - m.zeta_minus * k1m) / (4.0 * kPi * is * r);

  Complex g12;
  Complex g21;
  if (p.kind() == SpinOrbitKind::rashba) {
    g12 = Complex(-dx1, dx2) * mix;
    g21 = Complex(dx1, dx2) * mix;
  } else {
    g12 = Complex(dx2, -dx1) * mix;
    g21 = -Complex(dx2, dx1) * mix;
  }

  SpinMatrix2 g;
  g << diag, g12, g21, diag;
  return g;
}

Complex q_helper(const SpectralPoint& z) {
  if (z.z == 0.0) throw DomainError("q_helper: z = 0");
  return (digamma_one() - std::log(sqrt_minus(z)) + kLn2) / (2.0 * kPi);
}

Complex renormalized_green_scalar(const SpectralPoint& z, const SpinOrbitParams& p) {
  const Complex base = q_helper(z);
  const double kappa = p.kappa();
  if (kappa == 0.0) return base;

  const auto m = effective_momenta(z, p);
  if (m.root == 0.0) throw DomainError("renormalized_green: z + kappa^2 = 0 is a spectral threshold");
  // ln((s + i kappa)/(s - i kappa)) is taken as ln zeta+ - ln zeta-; both
  // momenta have Re >= 0, so this is the continuation that matches the
  // short-distance limit of the kernel.
  const Complex log_ratio = std::log(m.zeta_plus) - std::log(m.zeta_minus);
  return base + kappa / (2.0 * kI * m.root) * log_ratio / (2.0 * kPi);
}

SpinMatrix2 renormalized_green(const SpectralPoint& z, const SpinOrbitParams& p) {
  return renormalized_green_scalar(z, p) * pauli::sigma0();
}

RenormalizationOracleResult renormalized_green_oracle(const SpectralPoint& z, const SpinOrbitParams& p,
                                                      const RenormalizationOracleOptions& options) {
  const double norm = std::hypot(options.direction.x1, options.direction.x2);
  if (!(norm > 0.0)) throw std::invalid_argument("oracle direction must be nonzero");
  const double e1 = options.direction.x1 / norm;
  const double e2 = options.direction.x2 / norm;

  std::vector<double> radii = options.radii;
  if (radii.empty()) {
    const auto m = effective_momenta(z, p);
    const double scale = std::max({1.0, std::abs(m.zeta_plus), std::abs(m.zeta_minus)});
    double r = 0.25 / scale;
    for (int k = 0; k < 25; ++k, r *= 0.5) radii.push_back(r);
  }
  if (radii.size() < 3) throw std::invalid_argument("oracle needs at least three radii");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] < radii[k - 1]))) {
      throw std::invalid_argument("oracle radii must be positive and strictly decreasing");
    }
  }

  const PlanePoint& x = options.base;
  auto sample = [&](double r) -> SpinMatrix2 {
    const PlanePoint fwd{x.x1 + r * e1, x.x2 + r * e2};
    const PlanePoint bwd{x.x1 - r * e1, x.x2 - r * e2};
    const SpinMatrix2 g = 0.5 * (spin_orbit_green(x, fwd, z, p) + spin_orbit_green(x, bwd, z, p));
    return g + (std::log(r) / (2.0 * kPi)) * pauli::sigma0();
  };

  // Error terms come in pairs r^{2m} ln r, r^{2m}; halving-ratio Richardson
  // with exponents 2,2,4,4 removes both members of each pair.
  constexpr int kLevels = 4;
  constexpr int kExponent[kLevels] = {2, 2, 4, 4};

  std::vector<std::vector<SpinMatrix2>> table;
  SpinMatrix2 previous = SpinMatrix2::Zero();
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < radii.size(); ++k) {
    std::vector<SpinMatrix2> row{sample(radii[k])};
    const int depth = std::min<int>(static_cast<int>(k), kLevels);
    for (int j = 1; j <= depth; ++j) {
      const double t = std::pow(radii[k - j] / radii[k], 1.0 / j);
      const double factor = std::pow(t, kExponent[j - 1]) - 1.0;
      row.push_back(row[j - 1] + (row[j - 1] - table[k - 1][j - 1]) / factor);
    }
    const SpinMatrix2 estimate = row.back();
    if (k >= 3) {
      residual = max_abs_diff(estimate, previous);
      if (residual < options.tolerance) {
        return {estimate, residual, static_cast<int>(k + 1)};
      }
    }
    previous = estimate;
    table.push_back(std::move(row));
  }
  throw ConvergenceError("renormalized_green_oracle: extrapolation did not converge", residual);
}

}  // namespace hybrid

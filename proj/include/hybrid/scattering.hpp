#pragma once

#include <span>
#include <vector>

#include "hybrid/junction.hpp"
#include "hybrid/lead_green.hpp"
#include "hybrid/plane_green.hpp"

namespace hybrid {

/// Lead momentum k > 0, energy k^2 + i0.
class ScatteringMomentum {
 public:
  explicit ScatteringMomentum(double k);
  double value() const { return k_; }
  SpectralPoint energy() const { return SpectralPoint::above(k_ * k_); }

 private:
  double k_;
};

struct ReflectionResult {
  Complex R;
  double probability = 0.0;   // |R|^2
  double transmission = 0.0;  // 1 - |R|^2
};

/// R(k) = -[(a + ik)(G^ren(k^2) - d) + |c|^2] / [(a - ik)(G^ren(k^2) - d) + |c|^2].
/// Independent of the incident spin. Throws DomainError when the
/// denominator vanishes.
ReflectionResult reflection_amplitude(const ScatteringMomentum& k, const SpinIndependentCoupling& c,
                                      const SpinOrbitParams& p);

/// Spinless reference: the same expression with the scalar q_helper(k^2 + i0).
Complex spinless_reference_reflection(const ScatteringMomentum& k, double a, Complex c, double d);

/// R continued off the axis, ik -> i sqrt(z) with sqrt(z) = i sqrt_minus(z).
/// Used to validate the limiting-absorption evaluation.
Complex reflection_amplitude_at(const SpectralPoint& z, const SpinIndependentCoupling& c, const SpinOrbitParams& p);

/// Polynomial extrapolation to eps -> 0 of R(k^2 + i eps) over the given
/// ladder (default 1e-4, 1e-6, 1e-8).
Complex reflection_epsilon_ladder(const ScatteringMomentum& k, const SpinIndependentCoupling& c,
                                  const SpinOrbitParams& p, std::span<const double> eps = {});

struct LeadSample {
  LeadPoint point;
  Spinor value;
};

struct PlaneSample {
  PlanePoint point;
  Spinor value;
};

/// Generalized eigenfunction for a particle incident along the lead:
///   psi = psi0 - gamma_z [Q(z) - Ã]^{-1} u,  z = k^2 + i0,
/// with psi0 = (cos(kx) spin, 0) and u = (spin, 0) its boundary values.
struct ScatteringState {
  double k = 0.0;
  Spinor incident_spin;
  std::vector<LeadSample> lead;
  std::vector<PlaneSample> plane;
  BoundaryVector weights;  // [Q - Ã]^{-1} u
};

ScatteringState scattering_state(const ScatteringMomentum& k, const Spinor& spin, std::span<const LeadPoint> lead_samples,
                                 std::span<const PlanePoint> plane_samples, const CouplingMatrices& m,
                                 const SpinOrbitParams& p);

ScatteringState scattering_state(const ScatteringMomentum& k, const Spinor& spin, std::span<const LeadPoint> lead_samples,
                                 std::span<const PlanePoint> plane_samples, const SpinIndependentCoupling& c,
                                 const SpinOrbitParams& p);

/// Least-squares fit psi_lead(x) = alpha e^{-ikx} + beta e^{ikx} over the
/// lead samples with x in [5/k, 50/k]; at least 64 samples are required.
struct FarFieldFit {
  Spinor incoming;  // alpha
  Spinor outgoing;  // beta
  double residual = 0.0;
  int samples = 0;

  /// beta/alpha projected on the incoming spinor.
  Complex ratio() const;
};

FarFieldFit fit_lead_far_field(const ScatteringState& state);

/// n evenly spaced lead points covering the far-field window [5/k, 50/k].
std::vector<LeadPoint> far_field_window(double k, int n = 64);

}  // namespace hybrid

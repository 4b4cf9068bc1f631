#pragma once

#include <optional>
#include <vector>

#include "hybrid/junction.hpp"
#include "hybrid/plane_green.hpp"

namespace hybrid {

/// kappa_b > 0 with E = -kappa_b^2.
class BindingParameter {
 public:
  explicit BindingParameter(double kappa_b);
  double value() const { return kappa_b_; }
  double energy() const { return -kappa_b_ * kappa_b_; }

 private:
  double kappa_b_;
};

/// Imaginary-part threshold below which g(-kappa_b^2) counts as real.
inline constexpr double kRealityTolerance = 1e-10;

/// Real scalar part g of G^ren(-kappa_b^2). Throws RegionError when
/// |Im g| > 1e-10 (the energy lies in the essential spectrum).
double real_renormalized_green(const BindingParameter& kb, const SpinOrbitParams& p);

/// (kappa_b + a)(g - d) + |c|^2, where g is the real part of G^ren(-kappa_b^2).
///
/// A decaying lead component e^{-kappa_b x} has psi' = -kappa_b psi and the
/// plane component has L1 = g L0; inserting both into the boundary
/// conditions gives a nontrivial solution exactly when this vanishes. It is
/// the determinant of Q - Ã up to the nonzero factor 1/(a kappa_b).
double bound_state_residual(const BindingParameter& kb, const SpinIndependentCoupling& c, const SpinOrbitParams& p);

struct SearchInterval {
  double lo;
  double hi;
};

/// (kappa + 1e-6, kappa + 50].
SearchInterval default_search_interval(const SpinOrbitParams& p);

enum class DualityCheck {
  krein,              // smallest/largest singular value of Q(-kappa_b^2) - Ã
  boundary_condition  // A singular: same ratio for the untransformed system
};

struct BoundState {
  double energy = 0.0;
  double kappa_b = 0.0;
  double residual = 0.0;
  double singular_ratio = 0.0;
  DualityCheck check = DualityCheck::krein;
  int multiplicity = 1;  // 2 marks a tangency flagged without sign change

  bool passes_duality(double threshold = 1e-8) const { return singular_ratio < threshold; }
};

struct BoundStateSearchOptions {
  int grid_points = 1000;
  double root_tolerance = 1e-10;
  double tangency_threshold = 1e-12;
};

/// Roots of bound_state_residual on the interval, bracketed on a grid
/// geometric in kappa_b - kappa and refined by bisection. Every root carries
/// the singular-value ratio of the junction system as an independent check.
/// Throws RegionError if part of the interval lies where g is not real.
std::vector<BoundState> find_bound_states(const SpinIndependentCoupling& c, const SpinOrbitParams& p,
                                          const SearchInterval& search, const BoundStateSearchOptions& options = {});

/// Smallest over largest singular value of the 4x4 junction system at
/// E = -kappa_b^2. Uses Q - Ã when A is regular and the raw boundary-condition
/// system [[-(kappa_b + A), -C*], [-C, g - D]] otherwise.
double duality_ratio(const BindingParameter& kb, const CouplingMatrices& m, const SpinOrbitParams& p,
                     DualityCheck* used = nullptr);

/// d such that the residual vanishes at kappa_0 = sqrt(-E0):
/// d = g(-kappa_0^2) + |c|^2 / (kappa_0 + a).
double design_coupling_for_eigenvalue(double target_energy, double a, Complex c, const SpinOrbitParams& p);

struct RealitySample {
  double kappa_b;
  double imag_g;
};

/// Measured region where g(-kappa_b^2) is real, next to the reference
/// interval (-kappa^2, 0) in energy.
struct RealityReport {
  double kappa = 0.0;
  std::vector<RealitySample> below_threshold;  // kappa_b in (0, kappa)
  std::vector<RealitySample> above_threshold;  // kappa_b in (kappa, kappa + 50]
  double max_imag_below = 0.0;
  double max_imag_above = 0.0;
  // Real-valued for every sampled kappa_b > kappa, i.e. E < -kappa^2.
  bool real_below_essential_spectrum = false;
  // Real-valued on (-kappa^2, 0). Vacuous for kappa = 0.
  bool real_on_reference_interval = false;
};

RealityReport measure_reality_region(const SpinOrbitParams& p, int samples = 200);

}  // namespace hybrid

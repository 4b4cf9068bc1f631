#pragma once

#include <variant>

#include <Eigen/Dense>

#include "hybrid/junction.hpp"
#include "hybrid/lead_green.hpp"
#include "hybrid/plane_green.hpp"

namespace hybrid {

/// A point of the hybrid configuration space: the lead or the plane.
using ConfigPoint = std::variant<LeadPoint, PlanePoint>;

/// Kernel G0(p, junction; z): spin rows, boundary-space columns.
using TraceBlock = Eigen::Matrix<Complex, 2, 4>;
/// Kernel G0(junction, p; z): boundary-space rows, spin columns.
using AdjointTraceBlock = Eigen::Matrix<Complex, 4, 2>;

/// Lead(x) -> [G_lead(x, 0) sigma_0 | 0], Plane(x) -> [0 | G_J(x, 0)].
/// The junction itself is rejected.
TraceBlock trace_kernel(const ConfigPoint& p, const SpectralPoint& z, const SpinOrbitParams& so);

/// trace_kernel(p, conj z)^dagger, obtained from the kernel symmetry
/// G(x, 0; conj z)^dagger = G(0, x; z). Valid on the flagged real axis too.
AdjointTraceBlock adjoint_trace_kernel(const ConfigPoint& p, const SpectralPoint& z, const SpinOrbitParams& so);

/// Decoupled kernel G0(p, p'; z); lead-plane cross blocks vanish.
SpinMatrix2 decoupled_green(const ConfigPoint& p, const ConfigPoint& p_prime, const SpectralPoint& z,
                            const SpinOrbitParams& so);

/// Resolvent of H_A at a fixed spectral point, kept in factored form:
///   G_A(p, p') = G0(p, p') - T(p) [Q(z) - Ã]^{-1} T*(p').
class Resolvent {
 public:
  Resolvent(const SpectralPoint& z, const SpinOrbitParams& so, const CouplingMatrices& m);

  const SpectralPoint& spectral_point() const { return z_; }
  const KreinDenominator& denominator() const { return denominator_; }

  SpinMatrix2 operator()(const ConfigPoint& p, const ConfigPoint& p_prime) const;

  /// The finite-rank correction T(p) [Q - Ã]^{-1} T*(p').
  SpinMatrix2 correction(const ConfigPoint& p, const ConfigPoint& p_prime) const;

 private:
  SpectralPoint z_;
  SpinOrbitParams so_;
  KreinDenominator denominator_;
};

SpinMatrix2 full_green(const ConfigPoint& p, const ConfigPoint& p_prime, const SpectralPoint& z,
                       const SpinOrbitParams& so, const CouplingMatrices& m);

}  // namespace hybrid

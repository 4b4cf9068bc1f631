#pragma once

#include <optional>

#include <Eigen/Dense>

#include "hybrid/plane_green.hpp"
#include "hybrid/specfun.hpp"
#include "hybrid/spin.hpp"

namespace hybrid {

/// 4x4 matrix on the boundary-value space: rows/columns 0,1 are the lead
/// spin components, 2,3 the plane spin components.
using BoundaryMatrix = Eigen::Matrix4cd;
using BoundaryVector = Eigen::Vector4cd;

/// Dimensionful constants of the spin-orbit plane.
struct PhysicalScales {
  double alpha = 0.0;   // Rashba or Dresselhaus constant
  double m_star = 1.0;  // effective mass
  double hbar = 1.0;
};

/// kappa = m* alpha / hbar^2.
double reduce_units(const PhysicalScales& s);

/// Junction parameters (A, C, D) of the boundary conditions
///   psi'_lead(0+) = A psi_lead(0+) + C* L0(psi_plane)
///   L1(psi_plane) = C psi_lead(0+) + D L0(psi_plane)
/// Construct through validate_coupling(); A and D are Hermitian.
struct CouplingMatrices {
  SpinMatrix2 A;
  SpinMatrix2 C;
  SpinMatrix2 D;

  /// The block matrix [[A, C*], [C, D]].
  BoundaryMatrix block() const;
};

/// Spin-independent coupling, A = a sigma_0, C = c sigma_0, D = d sigma_0.
struct SpinIndependentCoupling {
  double a = 0.0;
  Complex c = 0.0;
  double d = 0.0;

  CouplingMatrices matrices() const;
};

struct TildeMatrix {
  BoundaryMatrix value;
};

/// Generalized boundary values of a state at the junction.
struct BoundaryData {
  Spinor lead_value;
  Spinor lead_derivative;
  Spinor L0;
  Spinor L1;
};

struct KreinMatrix {
  BoundaryMatrix value;
};

inline constexpr double kHermiticityTolerance = 1e-12;
inline constexpr double kSingularConditionThreshold = 1e14;

/// Rejects non-Hermitian A or D (tolerance 1e-12, entrywise) and non-finite
/// entries. ValidationError::offending() names the matrix.
CouplingMatrices validate_coupling(const SpinMatrix2& A, const SpinMatrix2& C, const SpinMatrix2& D);

/// Thin-fibre coupling of radius rho:
/// A = sigma_0/(2 rho), C = sigma_0/sqrt(2 pi rho), D = -ln(rho) sigma_0.
CouplingMatrices natural_coupling(double rho);

/// Returns the spin-independent scalars if every matrix is a multiple of
/// sigma_0 (to 1e-14), nothing otherwise.
std::optional<SpinIndependentCoupling> as_spin_independent(const CouplingMatrices& m);

/// Ã = [[-A^-1, -A^-1 C*], [-C A^-1, D - C A^-1 C*]].
/// Throws ValidationError if A is singular (condition number above 1e14).
TildeMatrix tilde_transform(const CouplingMatrices& m);

/// Residual of the boundary conditions for the given data (max entry).
double boundary_condition_residual(const CouplingMatrices& m, const BoundaryData& b);

/// Residual of Ã Γ1 - Γ2 = 0 with Γ1 = (-psi'_lead, L0), Γ2 = (psi_lead, L1).
double tilde_relation_residual(const TildeMatrix& t, const BoundaryData& b);

/// General symmetrized form  𝒜 Γ + ℬ Γ' = 0: admissible iff (𝒜|ℬ) has rank
/// four and 𝒜ℬ* is Hermitian. Only checked, never used for dynamics.
bool is_admissible_general(const BoundaryMatrix& a, const BoundaryMatrix& b, double tolerance = 1e-12);

/// Block-diagonal Q(z) = diag(i/sqrt(z) sigma_0, G^ren(z)).
KreinMatrix krein_matrix(const SpectralPoint& z, const SpinOrbitParams& p);

struct KreinDenominator {
  BoundaryMatrix matrix;   // Q(z) - Ã
  BoundaryMatrix inverse;
  Complex determinant;
  double condition = 0.0;  // ratio of extreme singular values
};

/// Q(z) - Ã and its inverse. Throws SpectralPointError (carrying the
/// determinant) when the condition number exceeds 1e14.
KreinDenominator krein_denominator(const SpectralPoint& z, const SpinOrbitParams& p, const TildeMatrix& t);
KreinDenominator krein_denominator(const SpectralPoint& z, const SpinOrbitParams& p, const CouplingMatrices& m);

/// Singular values of Q(z) - Ã in decreasing order; never throws on
/// singularity.
Eigen::Vector4d krein_singular_values(const SpectralPoint& z, const SpinOrbitParams& p, const TildeMatrix& t);

}  // namespace hybrid

#include "hybrid/junction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hybrid/errors.hpp"
#include "hybrid/lead_green.hpp"

namespace hybrid {

namespace {

bool all_finite(const SpinMatrix2& m) { return m.allFinite(); }

double hermiticity_defect(const SpinMatrix2& m) { return max_abs_diff(m, m.adjoint()); }

bool is_scalar(const SpinMatrix2& m, double tol) {
  return std::abs(m(0, 1)) <= tol && std::abs(m(1, 0)) <= tol && std::abs(m(0, 0) - m(1, 1)) <= tol;
}

Eigen::Vector4d singular_values(const BoundaryMatrix& m) {
  return Eigen::JacobiSVD<BoundaryMatrix>(m).singularValues();
}

}  // namespace

double reduce_units(const PhysicalScales& s) {
  if (!(s.m_star > 0.0) || !(s.hbar > 0.0) || !std::isfinite(s.m_star) || !std::isfinite(s.hbar)) {
    throw std::invalid_argument("physical scales need m* > 0 and hbar > 0");
  }
  if (!std::isfinite(s.alpha)) throw std::invalid_argument("spin-orbit constant must be finite");
  return s.m_star * s.alpha / (s.hbar * s.hbar);
}

BoundaryMatrix CouplingMatrices::block() const {
  BoundaryMatrix m;
  m << A, C.adjoint(), C, D;
  return m;
}

CouplingMatrices SpinIndependentCoupling::matrices() const {
  const SpinMatrix2 id = pauli::sigma0();
  return validate_coupling(a * id, c * id, d * id);
}

CouplingMatrices validate_coupling(const SpinMatrix2& A, const SpinMatrix2& C, const SpinMatrix2& D) {
  for (const auto& [m, name] : {std::pair{&A, "A"}, std::pair{&C, "C"}, std::pair{&D, "D"}}) {
    if (!all_finite(*m)) throw ValidationError(std::string("coupling matrix ") + name + " has non-finite entries", name);
  }
  if (hermiticity_defect(A) > kHermiticityTolerance) {
    throw ValidationError("coupling matrix A is not Hermitian", "A");
  }
  if (hermiticity_defect(D) > kHermiticityTolerance) {
    throw ValidationError("coupling matrix D is not Hermitian", "D");
  }
  return {A, C, D};
}

CouplingMatrices natural_coupling(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("natural_coupling: rho must be positive");
  const SpinMatrix2 id = pauli::sigma0();
  return validate_coupling(id / (2.0 * rho), id / std::sqrt(2.0 * kPi * rho), -std::log(rho) * id);
}

std::optional<SpinIndependentCoupling> as_spin_independent(const CouplingMatrices& m) {
  constexpr double tol = 1e-14;
  if (!is_scalar(m.A, tol) || !is_scalar(m.C, tol) || !is_scalar(m.D, tol)) return std::nullopt;
  return SpinIndependentCoupling{m.A(0, 0).real(), m.C(0, 0), m.D(0, 0).real()};
}

TildeMatrix tilde_transform(const CouplingMatrices& m) {
  const Eigen::Vector2d sv = Eigen::JacobiSVD<SpinMatrix2>(m.A).singularValues();
  const double condition = sv(1) > 0.0 ? sv(0) / sv(1) : std::numeric_limits<double>::infinity();
  if (!(condition <= kSingularConditionThreshold)) {
    throw ValidationError("Neumann-component coupling not representable: A is singular (condition " +
                              std::to_string(condition) + ")",
                          "A");
  }
  const SpinMatrix2 a_inv = m.A.inverse();
  const SpinMatrix2 c_star = m.C.adjoint();
  BoundaryMatrix t;
  t << -a_inv, -a_inv * c_star, -m.C * a_inv, m.D - m.C * a_inv * c_star;

  const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
  if (max_abs_diff(t, t.adjoint()) > kHermiticityTolerance * scale) {
    throw std::logic_error("tilde_transform produced a non-Hermitian matrix");
  }
  return {t};
}

double boundary_condition_residual(const CouplingMatrices& m, const BoundaryData& b) {
  const Spinor r1 = b.lead_derivative - m.A * b.lead_value - m.C.adjoint() * b.L0;
  const Spinor r2 = b.L1 - m.C * b.lead_value - m.D * b.L0;
  return std::max(r1.cwiseAbs().maxCoeff(), r2.cwiseAbs().maxCoeff());
}

double tilde_relation_residual(const TildeMatrix& t, const BoundaryData& b) {
  BoundaryVector gamma1;
  gamma1 << -b.lead_derivative, b.L0;
  BoundaryVector gamma2;
  gamma2 << b.lead_value, b.L1;
  return (t.value * gamma1 - gamma2).cwiseAbs().maxCoeff();
}

bool is_admissible_general(const BoundaryMatrix& a, const BoundaryMatrix& b, double tolerance) {
  Eigen::Matrix<Complex, 4, 8> joined;
  joined << a, b;
  Eigen::JacobiSVD<Eigen::Matrix<Complex, 4, 8>> svd(joined);
  const auto& sv = svd.singularValues();
  if (!(sv(3) > tolerance * sv(0))) return false;
  const BoundaryMatrix ab = a * b.adjoint();
  return max_abs_diff(ab, ab.adjoint()) <= tolerance * std::max(1.0, ab.cwiseAbs().maxCoeff());
}

KreinMatrix krein_matrix(const SpectralPoint& z, const SpinOrbitParams& p) {
  BoundaryMatrix q = BoundaryMatrix::Zero();
  q.topLeftCorner<2, 2>() = lead_diagonal(z) * pauli::sigma0();
  q.bottomRightCorner<2, 2>() = renormalized_green(z, p);
  return {q};
}

KreinDenominator krein_denominator(const SpectralPoint& z, const SpinOrbitParams& p, const TildeMatrix& t) {
  KreinDenominator out;
  out.matrix = krein_matrix(z, p).value - t.value;
  const Eigen::Vector4d sv = singular_values(out.matrix);
  out.condition = sv(3) > 0.0 ? sv(0) / sv(3) : std::numeric_limits<double>::infinity();
  const Eigen::FullPivLU<BoundaryMatrix> lu(out.matrix);
  out.determinant = lu.determinant();
  if (!(out.condition <= kSingularConditionThreshold)) {
    throw SpectralPointError("Krein denominator is singular at this spectral point", out.determinant, out.condition);
  }
  out.inverse = lu.inverse();
  return out;
}

KreinDenominator krein_denominator(const SpectralPoint& z, const SpinOrbitParams& p, const CouplingMatrices& m) {
  return krein_denominator(z, p, tilde_transform(m));
}

Eigen::Vector4d krein_singular_values(const SpectralPoint& z, const SpinOrbitParams& p, const TildeMatrix& t) {
  return singular_values(krein_matrix(z, p).value - t.value);
}

}  // namespace hybrid

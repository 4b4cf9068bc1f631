// Test-only reference routes. Nothing here calls into the code paths it is
// used to check, except for the kernel under test itself.
#pragma once

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybrid/junction.hpp"
#include "hybrid/plane_green.hpp"
#include "hybrid/scattering.hpp"
#include "hybrid/spin.hpp"

#ifndef HYBRID_TEST_DATA_DIR
#error "HYBRID_TEST_DATA_DIR must point at tests/data"
#endif

namespace hybrid::testing {

struct BesselRow {
  Complex w;
  Complex k0;
  Complex k1;
};

// Frozen mpmath table generated by tools/oracle/gen_bessel_table.py.
inline std::vector<BesselRow> load_bessel_table() {
  std::ifstream in(std::string(HYBRID_TEST_DATA_DIR) + "/bessel_table.csv");
  if (!in) throw std::runtime_error("cannot open bessel_table.csv");
  std::vector<BesselRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double v[6];
    char comma;
    for (int i = 0; i < 6; ++i) {
      ss >> v[i];
      if (i < 5) ss >> comma;
    }
    rows.push_back({{v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}});
  }
  return rows;
}

inline double relative_error(Complex got, Complex want) { return std::abs(got - want) / std::abs(want); }

// Applies (-Laplace - z) sigma_0 + 2 kappa U_J to column `col` of
// G(., x'; z) at x with a 5-point Laplacian and central first differences.
// Returns |residual| / (|Laplace G| + |z G|).
inline double pde_relative_residual(const PlanePoint& x, const PlanePoint& xp, const SpectralPoint& z,
                                    const SpinOrbitParams& p, int col, double h = 1e-3) {
  auto f = [&](double dx1, double dx2) -> Spinor {
    return spin_orbit_green({x.x1 + dx1, x.x2 + dx2}, xp, z, p).col(col);
  };
  const Spinor c = f(0, 0);
  const Spinor e = f(h, 0), w = f(-h, 0), n = f(0, h), s = f(0, -h);
  const Spinor lap = (e + w + n + s - 4.0 * c) / (h * h);
  const Spinor d1 = (e - w) / (2.0 * h);
  const Spinor d2 = (n - s) / (2.0 * h);
  const Complex mi(0.0, -1.0);
  const Spinor k1 = mi * d1;
  const Spinor k2 = mi * d2;
  Spinor u;
  if (p.kind() == SpinOrbitKind::rashba) {
    u = pauli::sigma1() * k2 - pauli::sigma2() * k1;
  } else {
    u = pauli::sigma2() * k2 - pauli::sigma1() * k1;
  }
  const Spinor residual = -lap - z.z * c + 2.0 * p.kappa() * u;
  return residual.norm() / (lap.norm() + std::abs(z.z) * c.norm());
}

inline Complex random_upper_z(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> re(-8.0, 8.0);
  std::uniform_real_distribution<double> im(0.2, 5.0);
  return {re(rng), im(rng)};
}

inline PlanePoint random_plane_point(std::mt19937_64& rng, double extent = 3.0) {
  std::uniform_real_distribution<double> u(-extent, extent);
  return {u(rng), u(rng)};
}

// Reads psi_lead(0+), psi'_lead(0+), L0, L1 off a scattering state sampled
// near the junction. Lead: cubic extrapolation from x = h, 2h, 3h, 4h.
// Plane: the +e/-e average removes odd terms; two radii then fix the
// coefficients of ln r and 1.
inline BoundaryData extract_boundary_data(const ScatteringMomentum& k, const Spinor& spin, const CouplingMatrices& m,
                                          const SpinOrbitParams& p, double h = 1e-4, double r = 1e-5) {
  const std::vector<LeadPoint> lead{{h}, {2 * h}, {3 * h}, {4 * h}};
  const std::vector<PlanePoint> plane{{r, 0.0}, {-r, 0.0}, {2 * r, 0.0}, {-2 * r, 0.0}};
  const ScatteringState s = scattering_state(k, spin, lead, plane, m, p);
  const Spinor f1 = s.lead[0].value, f2 = s.lead[1].value, f3 = s.lead[2].value, f4 = s.lead[3].value;
  BoundaryData b;
  b.lead_value = 4.0 * f1 - 6.0 * f2 + 4.0 * f3 - f4;
  b.lead_derivative = (-13.0 / 3.0 * f1 + 9.5 * f2 - 7.0 * f3 + 11.0 / 6.0 * f4) / h;
  const Spinor near = 0.5 * (s.plane[0].value + s.plane[1].value);
  const Spinor far = 0.5 * (s.plane[2].value + s.plane[3].value);
  const double ln_near = std::log(r);
  const double ln_far = std::log(2 * r);
  b.L0 = -2.0 * kPi * (near - far) / (ln_near - ln_far);
  b.L1 = near + b.L0 * (ln_near / (2.0 * kPi));
  return b;
}

// Random Hermitian 2x2 matrix with entries of order `scale`.
inline SpinMatrix2 random_hermitian(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  SpinMatrix2 m;
  const Complex off(u(rng), u(rng));
  m << u(rng), off, std::conj(off), u(rng);
  return m;
}

inline SpinMatrix2 random_matrix(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  SpinMatrix2 m;
  m << Complex(u(rng), u(rng)), Complex(u(rng), u(rng)), Complex(u(rng), u(rng)), Complex(u(rng), u(rng));
  return m;
}

inline Spinor random_spinor(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return Spinor(Complex(u(rng), u(rng)), Complex(u(rng), u(rng)));
}

// Spin-independent coupling with |a| bounded away from zero.
inline SpinIndependentCoupling random_scalar_coupling(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double a = u(rng);
  if (std::abs(a) < 0.1) a += a < 0 ? -0.1 : 0.1;
  return {a, Complex(u(rng), u(rng)), u(rng)};
}

}  // namespace hybrid::testing

#include <doctest.h>

#include <cmath>
#include <random>

#include "hybrid/errors.hpp"
#include "hybrid/plane_green.hpp"
#include "support/oracles.hpp"

using namespace hybrid;

namespace {

const SpinOrbitParams kRashba1{SpinOrbitKind::rashba, 1.0};

// mpmath, 30 digits
constexpr double kQMinus4 = -0.09186672629915399;
constexpr double kQMinus1 = 0.018451073777171806;
constexpr double kK0At1Over2Pi = 0.067008120508497137;
constexpr double kGrenKappa1ZMinus9 = -0.13727595785498614;

}  // namespace

TEST_CASE("effective momenta") {
  auto m = effective_momenta(SpectralPoint::at(-4.0), {SpinOrbitKind::rashba, 0.0});
  CHECK(m.zeta_plus == Complex(2.0, 0.0));
  CHECK(m.zeta_minus == Complex(2.0, 0.0));

  m = effective_momenta(SpectralPoint::at(-1.0), kRashba1);
  CHECK(m.zeta_plus == Complex(0.0, 1.0));
  CHECK(m.zeta_minus == Complex(0.0, -1.0));

  m = effective_momenta(SpectralPoint::at(-2.0), kRashba1);
  CHECK(std::abs(m.zeta_plus - Complex(1.0, 1.0)) < 1e-15);
  CHECK(std::abs(m.zeta_minus - Complex(1.0, -1.0)) < 1e-15);

  SUBCASE("sum and difference invariants") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
      const Complex z = hybrid::testing::random_upper_z(rng);
      const SpinOrbitParams p{SpinOrbitKind::dresselhaus, 0.1 * i};
      const auto e = effective_momenta(SpectralPoint::at(z), p);
      CHECK(std::abs(e.zeta_plus - e.zeta_minus - Complex(0.0, 2.0 * p.kappa())) < 1e-13);
      CHECK(std::abs(e.zeta_plus + e.zeta_minus - 2.0 * sqrt_minus(SpectralPoint::at(z + p.kappa() * p.kappa()))) <
            1e-13);
      CHECK(e.zeta_plus.real() >= 0.0);
      CHECK(e.zeta_minus.real() >= 0.0);
    }
  }
}

TEST_CASE("negative strength is folded to |kappa|") {
  CHECK(SpinOrbitParams(SpinOrbitKind::rashba, -0.7).kappa() == 0.7);
  CHECK_THROWS(SpinOrbitParams(SpinOrbitKind::rashba, std::nan("")));
}

TEST_CASE("free_green") {
  CHECK(std::abs(free_green({0, 0}, {1, 0}, SpectralPoint::at(-1.0)) - kK0At1Over2Pi) < 1e-15);
  const double r = 2.5;
  CHECK(std::abs(free_green({0, 0}, {r, 0}, SpectralPoint::at(-1.0)) -
                 free_green({0, 0}, {1, 0}, SpectralPoint::at(-r * r))) < 1e-15);
  const Complex a = free_green({1, 1}, {1 + 0.6, 1 + 0.8}, SpectralPoint::at(Complex(-2, 1)));
  const Complex b = free_green({-3, 2}, {-3 - 1.0, 2}, SpectralPoint::at(Complex(-2, 1)));
  CHECK(std::abs(a - b) < 1e-15);
  CHECK_THROWS_AS(free_green({1, 2}, {1, 2}, SpectralPoint::at(-1.0)), DomainError);
}

TEST_CASE("spin_orbit_green structure") {
  const SpectralPoint z = SpectralPoint::at(Complex(-3.0, 0.4));
  const PlanePoint x{0.3, -0.2};
  const PlanePoint xp{-0.5, 0.9};

  SUBCASE("kappa = 0 reduces to the scalar kernel") {
    const SpinMatrix2 g = spin_orbit_green(x, xp, z, {SpinOrbitKind::rashba, 0.0});
    CHECK(g(0, 1) == Complex(0.0, 0.0));
    CHECK(g(1, 0) == Complex(0.0, 0.0));
    CHECK(std::abs(g(0, 0) - free_green(x, xp, z)) < 1e-15);
    CHECK(g(1, 1) == g(0, 0));
  }

  SUBCASE("Rashba and Dresselhaus off-diagonals have equal modulus") {
    const SpinMatrix2 r = spin_orbit_green(x, xp, z, {SpinOrbitKind::rashba, 0.8});
    const SpinMatrix2 d = spin_orbit_green(x, xp, z, {SpinOrbitKind::dresselhaus, 0.8});
    CHECK(std::abs(std::abs(r(0, 1)) - std::abs(d(0, 1))) < 1e-15);
    CHECK(std::abs(std::abs(r(1, 0)) - std::abs(d(1, 0))) < 1e-15);
    CHECK(std::abs(r(0, 0) - d(0, 0)) < 1e-15);
  }

  SUBCASE("Hermitian kernel symmetry") {
    const SpectralPoint real_z = SpectralPoint::at(-5.0);
    const SpinMatrix2 a = spin_orbit_green({1, 0}, {0, 0}, real_z, kRashba1);
    const SpinMatrix2 b = spin_orbit_green({0, 0}, {1, 0}, real_z, kRashba1);
    CHECK(max_abs_diff(a.adjoint(), b) < 1e-12);

    std::mt19937_64 rng(11);
    for (int i = 0; i < 40; ++i) {
      const SpectralPoint w = SpectralPoint::at(hybrid::testing::random_upper_z(rng));
      const PlanePoint p1 = hybrid::testing::random_plane_point(rng);
      const PlanePoint p2 = hybrid::testing::random_plane_point(rng);
      for (auto kind : {SpinOrbitKind::rashba, SpinOrbitKind::dresselhaus}) {
        const SpinOrbitParams so{kind, 0.05 * i};
        const SpinMatrix2 lhs = spin_orbit_green(p1, p2, w, so).adjoint();
        const SpinMatrix2 rhs = spin_orbit_green(p2, p1, w.conjugate(), so);
        CHECK(max_abs_diff(lhs, rhs) < 1e-12);
      }
    }
  }

  SUBCASE("continuity as kappa -> 0") {
    const SpinMatrix2 g = spin_orbit_green(x, xp, z, {SpinOrbitKind::rashba, 1e-8});
    CHECK(max_abs_diff(g, free_green(x, xp, z) * pauli::sigma0()) < 1e-6);
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(spin_orbit_green(x, x, z, kRashba1), DomainError);
    CHECK_THROWS_AS(spin_orbit_green(x, xp, SpectralPoint::at(0.0), {SpinOrbitKind::rashba, 0.0}), DomainError);
    CHECK_THROWS_AS(spin_orbit_green(x, xp, SpectralPoint::at(-1.0), kRashba1), DomainError);
    CHECK_THROWS_AS(spin_orbit_green(x, xp, SpectralPoint::at(2.0), kRashba1), DomainError);
  }
}

TEST_CASE("spin_orbit_green solves the spin-orbit equation") {
  const SpectralPoint z = SpectralPoint::at(-5.0);
  const PlanePoint source{0.2, -0.1};
  for (auto kind : {SpinOrbitKind::rashba, SpinOrbitKind::dresselhaus}) {
    for (double kappa : {0.0, 0.7, 1.5}) {
      const SpinOrbitParams p{kind, kappa};
      for (const PlanePoint x : {PlanePoint{0.9, 0.3}, PlanePoint{-0.6, 1.4}, PlanePoint{2.0, -1.0}}) {
        for (int col = 0; col < 2; ++col) {
          CHECK(hybrid::testing::pde_relative_residual(x, source, z, p, col) <= 1e-3);
        }
      }
    }
  }
}

TEST_CASE("q_helper") {
  CHECK(std::abs(q_helper(SpectralPoint::at(-4.0)) - kQMinus4) < 1e-16);
  CHECK(std::abs(q_helper(SpectralPoint::at(-1.0)) - kQMinus1) < 1e-16);
  CHECK_THROWS_AS(q_helper(SpectralPoint::at(0.0)), DomainError);
  const SpectralPoint z = SpectralPoint::at(Complex(-2.0, 1.5));
  CHECK(renormalized_green(z, {SpinOrbitKind::rashba, 0.0}) == q_helper(z) * pauli::sigma0());
}

TEST_CASE("renormalized_green closed form") {
  CHECK(std::abs(renormalized_green_scalar(SpectralPoint::at(-9.0), kRashba1) - kGrenKappa1ZMinus9) < 1e-15);
  CHECK_THROWS_AS(renormalized_green(SpectralPoint::at(-1.0), kRashba1), DomainError);

  SUBCASE("off-diagonal entries vanish") {
    for (double kappa : {0.0, 0.3, 2.0}) {
      const SpinMatrix2 g = renormalized_green(SpectralPoint::at(Complex(-1.0, 2.0)), {SpinOrbitKind::rashba, kappa});
      CHECK(g(0, 1) == Complex(0.0));
      CHECK(g(1, 0) == Complex(0.0));
    }
  }

  SUBCASE("imaginary part on the positive axis is 1/4") {
    for (double k : {0.1, 0.5, 1.0, 10.0}) {
      for (double kappa : {0.0, 0.2, 1.0, 3.0}) {
        const Complex g = renormalized_green_scalar(SpectralPoint::above(k * k), {SpinOrbitKind::dresselhaus, kappa});
        CHECK(std::abs(g.imag() - 0.25) < 1e-10);
      }
    }
  }

  SUBCASE("real below the essential spectrum, complex inside it") {
    const double kappa = 1.3;
    const SpinOrbitParams p{SpinOrbitKind::rashba, kappa};
    for (double kb : {1.31, 2.0, 7.0}) {
      CHECK(std::abs(renormalized_green_scalar({Complex(-kb * kb, 0.0), Boundary::from_above}, p).imag()) < 1e-12);
    }
    for (double kb : {0.2, 0.8, 1.2}) {
      const double sigma = std::sqrt(kappa * kappa - kb * kb);
      const Complex g = renormalized_green_scalar({Complex(-kb * kb, 0.0), Boundary::from_above}, p);
      CHECK(g.imag() == doctest::Approx(kappa / (4.0 * sigma)).epsilon(1e-12));
    }
  }

  SUBCASE("continuous onto the flagged axis across -kappa^2") {
    const SpinOrbitParams p{SpinOrbitKind::rashba, 1.0};
    for (double e : {-0.5, 0.5, 3.0}) {
      const Complex flagged = renormalized_green_scalar(SpectralPoint::above(e), p);
      const Complex near = renormalized_green_scalar(SpectralPoint::at(Complex(e, 1e-10)), p);
      CHECK(std::abs(flagged - near) < 1e-8);
    }
  }
}

TEST_CASE("renormalization oracle") {
  SUBCASE("kappa = 0, z = -4") {
    const auto r = renormalized_green_oracle(SpectralPoint::at(-4.0), {SpinOrbitKind::rashba, 0.0});
    CHECK(max_abs_diff(r.value, kQMinus4 * pauli::sigma0()) < 1e-6);
  }

  SUBCASE("agrees with the closed form") {
    for (double kappa : {0.5, 1.0}) {
      for (auto kind : {SpinOrbitKind::rashba, SpinOrbitKind::dresselhaus}) {
        const SpinOrbitParams p{kind, kappa};
        const SpectralPoint z = SpectralPoint::at(Complex(-3.0, -2.0));
        CHECK(max_abs_diff(renormalized_green_oracle(z, p).value, renormalized_green(z, p)) < 1e-6);
      }
    }
    const auto r = renormalized_green_oracle(SpectralPoint::at(-9.0), kRashba1);
    CHECK(max_abs_diff(r.value, renormalized_green(SpectralPoint::at(-9.0), kRashba1)) < 1e-6);
  }

  SUBCASE("direction and base point independence") {
    const SpectralPoint z = SpectralPoint::at(-5.0);
    RenormalizationOracleOptions o1;
    RenormalizationOracleOptions o2;
    o2.direction = {0.0, 1.0};
    RenormalizationOracleOptions o3;
    o3.base = {3.0, -2.0};
    const auto a = renormalized_green_oracle(z, kRashba1, o1).value;
    CHECK(max_abs_diff(a, renormalized_green_oracle(z, kRashba1, o2).value) < 1e-8);
    CHECK(max_abs_diff(a, renormalized_green_oracle(z, kRashba1, o3).value) < 1e-8);
  }

  SUBCASE("non-convergence is reported with its residual") {
    RenormalizationOracleOptions o;
    o.radii = {0.5, 0.4, 0.3, 0.2};
    o.tolerance = 1e-14;
    try {
      renormalized_green_oracle(SpectralPoint::at(-4.0), kRashba1, o);
      FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
      CHECK(e.residual() > 1e-14);
    }
  }
}

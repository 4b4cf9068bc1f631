#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hybrid/errors.hpp"
#include "hybrid/spectrum.hpp"

using namespace hybrid;

namespace {

// kappa = 0 scalar part of G^ren, written out independently of q_helper.
double spinless_g(double kb) { return (-kEulerGamma - std::log(kb / 2.0)) / (2.0 * kPi); }

// det of the 2x2 scalar denominator diag(1/kb, g) - Ã_scalar.
double spinless_det(double kb, double a, Complex c, double d) {
  const double c2 = std::norm(c);
  return (1.0 / kb + 1.0 / a) * (spinless_g(kb) - d + c2 / a) - c2 / (a * a);
}

std::vector<double> brute_force_roots(double a, Complex c, double d, double lo, double hi) {
  std::vector<double> roots;
  const int n = 20000;
  double x0 = lo;
  double f0 = spinless_det(x0, a, c, d);
  for (int i = 1; i <= n; ++i) {
    const double x1 = lo * std::pow(hi / lo, static_cast<double>(i) / n);
    const double f1 = spinless_det(x1, a, c, d);
    if (f0 == 0.0 || f0 * f1 < 0.0) {
      double l = x0, h = x1, fl = f0;
      for (int it = 0; it < 200 && h - l > 1e-15 * h; ++it) {
        const double m = 0.5 * (l + h);
        const double fm = spinless_det(m, a, c, d);
        if ((fm < 0) == (fl < 0)) {
          l = m;
          fl = fm;
        } else {
          h = m;
        }
      }
      roots.push_back(0.5 * (l + h));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

}  // namespace

TEST_CASE("BindingParameter") {
  CHECK(BindingParameter(2.0).energy() == -4.0);
  CHECK_THROWS_AS(BindingParameter(0.0), std::invalid_argument);
  CHECK_THROWS_AS(BindingParameter(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(BindingParameter(std::nan("")), std::invalid_argument);
}

TEST_CASE("bound_state_residual") {
  const SpinOrbitParams p{SpinOrbitKind::rashba, 1.0};

  SUBCASE("c = 0 factorizes") {
    const double kb = 2.5;
    const double g = real_renormalized_green(BindingParameter(kb), p);
    CHECK(std::abs(bound_state_residual(BindingParameter(kb), {-kb, 0.0, 0.3}, p)) < 1e-15);
    CHECK(std::abs(bound_state_residual(BindingParameter(kb), {0.4, 0.0, g}, p)) < 1e-15);
  }

  SUBCASE("designed coupling zeroes the residual and changes sign around it") {
    const double d = design_coupling_for_eigenvalue(-4.0, 0.0, 1.0, p);
    CHECK(std::abs(d - (real_renormalized_green(BindingParameter(2.0), p) + 0.5)) < 1e-15);
    const SpinIndependentCoupling c{0.0, 1.0, d};
    CHECK(std::abs(bound_state_residual(BindingParameter(2.0), c, p)) < 1e-14);
    CHECK(bound_state_residual(BindingParameter(1.9), c, p) * bound_state_residual(BindingParameter(2.1), c, p) < 0);
  }

  SUBCASE("c -> 0 limit of the design") {
    const double g = real_renormalized_green(BindingParameter(3.0), p);
    CHECK(std::abs(design_coupling_for_eigenvalue(-9.0, 0.5, 1e-9, p) - g) < 1e-16);
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(bound_state_residual(BindingParameter(0.5), {1.0, 1.0, 0.0}, p), RegionError);
    CHECK_THROWS_AS(design_coupling_for_eigenvalue(-0.25, 0.0, 1.0, p), RegionError);
    CHECK_THROWS_AS(design_coupling_for_eigenvalue(-4.0, -2.0, 1.0, p), DomainError);
    CHECK_THROWS_AS(design_coupling_for_eigenvalue(1.0, 0.0, 1.0, p), std::invalid_argument);
  }
}

TEST_CASE("real_renormalized_green region") {
  // below the threshold the scalar part picks up Im g = kappa / (4 sigma)
  const double kappa = 1.0;
  const double kb = 0.6;
  try {
    real_renormalized_green(BindingParameter(kb), {SpinOrbitKind::dresselhaus, kappa});
    FAIL("expected RegionError");
  } catch (const RegionError& e) {
    CHECK(std::abs(std::abs(e.imag_part()) - kappa / (4.0 * std::sqrt(kappa * kappa - kb * kb))) < 1e-12);
  }
  CHECK_NOTHROW(real_renormalized_green(BindingParameter(1.0 + 1e-6), {SpinOrbitKind::dresselhaus, kappa}));
  CHECK_NOTHROW(real_renormalized_green(BindingParameter(0.3), {SpinOrbitKind::rashba, 0.0}));
}

TEST_CASE("find_bound_states") {
  SUBCASE("round trip across kappa") {
    for (double kappa : {0.0, 0.5, 1.0}) {
      const SpinOrbitParams p{SpinOrbitKind::rashba, kappa};
      for (double shift : {0.2, 1.0, 3.5}) {
        const double k0 = kappa + shift;
        const double a = 0.8;
        const Complex c(0.6, -0.3);
        const double d = design_coupling_for_eigenvalue(-k0 * k0, a, c, p);
        const auto roots = find_bound_states({a, c, d}, p, default_search_interval(p));
        REQUIRE_FALSE(roots.empty());
        bool found = false;
        for (const auto& r : roots) {
          CHECK(r.passes_duality());
          CHECK(r.check == DualityCheck::krein);
          if (std::abs(r.energy + k0 * k0) < 1e-8) found = true;
        }
        CHECK(found);
      }
    }
  }

  SUBCASE("no roots when nothing can vanish") {
    const SpinOrbitParams p{SpinOrbitKind::dresselhaus, 0.5};
    CHECK(find_bound_states({0.0, 0.0, -10.0}, p, default_search_interval(p)).empty());
    CHECK(find_bound_states({1.0, 0.0, -10.0}, p, default_search_interval(p)).empty());
  }

  SUBCASE("a = 0 falls back to the boundary-condition system") {
    const SpinOrbitParams p{SpinOrbitKind::rashba, 1.0};
    const double d = design_coupling_for_eigenvalue(-4.0, 0.0, 1.0, p);
    const auto roots = find_bound_states({0.0, 1.0, d}, p, default_search_interval(p));
    REQUIRE(roots.size() >= 1);
    bool found = false;
    for (const auto& r : roots) {
      CHECK(r.check == DualityCheck::boundary_condition);
      CHECK(r.passes_duality());
      if (std::abs(r.energy + 4.0) < 1e-8) found = true;
    }
    CHECK(found);
  }

  SUBCASE("spinless roots match a brute-force determinant scan") {
    const SpinOrbitParams p{SpinOrbitKind::rashba, 0.0};
    const std::vector<SpinIndependentCoupling> cases{
        {0.5, Complex(1.0, 0.0), 0.0}, {-0.3, Complex(0.2, 0.4), 0.1}, {2.0, Complex(0.0, 1.5), -0.5}};
    for (const auto& c : cases) {
      const SearchInterval s{1e-3, 50.0};
      const auto roots = find_bound_states(c, p, s);
      std::vector<double> reference = brute_force_roots(c.a, c.c, c.d, s.lo, s.hi);
      CHECK(roots.size() == reference.size());
      for (std::size_t i = 0; i < std::min(roots.size(), reference.size()); ++i) {
        CHECK(std::abs(roots[i].kappa_b - reference[i]) < 1e-8);
      }
    }
  }

  SUBCASE("search interval must avoid the essential spectrum") {
    const SpinOrbitParams p{SpinOrbitKind::rashba, 1.0};
    CHECK_THROWS_AS(find_bound_states({1.0, 1.0, 0.0}, p, SearchInterval{0.5, 3.0}), RegionError);
    CHECK_THROWS_AS(find_bound_states({1.0, 1.0, 0.0}, p, SearchInterval{3.0, 2.0}), std::invalid_argument);
  }
}

TEST_CASE("duality_ratio away from roots") {
  const SpinOrbitParams p{SpinOrbitKind::rashba, 0.5};
  const auto m = SpinIndependentCoupling{0.8, 0.5, 0.1}.matrices();
  DualityCheck used = DualityCheck::boundary_condition;
  CHECK(duality_ratio(BindingParameter(3.0), m, p, &used) > 1e-4);
  CHECK(used == DualityCheck::krein);
}

TEST_CASE("measure_reality_region") {
  const auto r = measure_reality_region({SpinOrbitKind::rashba, 1.0}, 100);
  CHECK(r.kappa == 1.0);
  CHECK(r.real_below_essential_spectrum);
  CHECK_FALSE(r.real_on_reference_interval);
  CHECK(r.max_imag_above < kRealityTolerance);
  CHECK(r.max_imag_below > 0.25 - 1e-12);
  CHECK(r.below_threshold.size() == 100);
  CHECK(r.above_threshold.size() == 100);

  const auto flat = measure_reality_region({SpinOrbitKind::dresselhaus, 0.0}, 50);
  CHECK(flat.real_below_essential_spectrum);
  CHECK(flat.below_threshold.empty());
}

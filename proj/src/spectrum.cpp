#include "hybrid/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hybrid/errors.hpp"

namespace hybrid {

namespace {

Complex g_at(double kappa_b, const SpinOrbitParams& p) {
  return renormalized_green_scalar({Complex(-kappa_b * kappa_b, 0.0), Boundary::from_above}, p);
}

double ratio_of(const Eigen::Vector4d& sv) { return sv(0) > 0.0 ? sv(3) / sv(0) : 0.0; }

std::vector<double> geometric_grid(double kappa, const SearchInterval& s, int n) {
  const double t0 = s.lo - kappa;
  const double t1 = s.hi - kappa;
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) grid[i] = kappa + t0 * std::pow(t1 / t0, double(i) / (n - 1));
  grid.front() = s.lo;
  grid.back() = s.hi;
  return grid;
}

template <class F>
double bisect(F&& f, double lo, double hi, double flo) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

template <class F>
double golden_minimum(F&& f, double lo, double hi) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? x1 : x2;
}

}  // namespace

BindingParameter::BindingParameter(double kappa_b) : kappa_b_(kappa_b) {
  if (!(kappa_b > 0.0) || !std::isfinite(kappa_b)) throw std::invalid_argument("binding parameter must be > 0");
}

double real_renormalized_green(const BindingParameter& kb, const SpinOrbitParams& p) {
  const Complex g = g_at(kb.value(), p);
  if (std::abs(g.imag()) > kRealityTolerance) {
    throw RegionError("energy -" + std::to_string(kb.value()) + "^2 is inside the essential spectrum", g.imag());
  }
  return g.real();
}

double bound_state_residual(const BindingParameter& kb, const SpinIndependentCoupling& c, const SpinOrbitParams& p) {
  const double g = real_renormalized_green(kb, p);
  return (kb.value() + c.a) * (g - c.d) + std::norm(c.c);
}

SearchInterval default_search_interval(const SpinOrbitParams& p) { return {p.kappa() + 1e-6, p.kappa() + 50.0}; }

double duality_ratio(const BindingParameter& kb, const CouplingMatrices& m, const SpinOrbitParams& p,
                     DualityCheck* used) {
  const SpectralPoint z{Complex(kb.energy(), 0.0), Boundary::from_above};
  std::optional<TildeMatrix> tilde;
  try {
    tilde = tilde_transform(m);
  } catch (const ValidationError&) {
  }
  if (tilde) {
    if (used) *used = DualityCheck::krein;
    return ratio_of(krein_singular_values(z, p, *tilde));
  }
  // psi' = -kappa_b psi on the lead and L1 = G^ren L0 in the plane.
  const SpinMatrix2 id = pauli::sigma0();
  BoundaryMatrix system;
  system << -(kb.value() * id + m.A), -m.C.adjoint(), -m.C, renormalized_green(z, p) - m.D;
  if (used) *used = DualityCheck::boundary_condition;
  return ratio_of(Eigen::JacobiSVD<BoundaryMatrix>(system).singularValues());
}

std::vector<BoundState> find_bound_states(const SpinIndependentCoupling& c, const SpinOrbitParams& p,
                                          const SearchInterval& search, const BoundStateSearchOptions& options) {
  const double kappa = p.kappa();
  if (!(search.lo < search.hi) || !std::isfinite(search.hi)) throw std::invalid_argument("invalid search interval");
  if (options.grid_points < 3) throw std::invalid_argument("bound-state grid needs at least three points");
  if (!(search.lo > kappa)) {
    const double probe = std::max(search.lo, 0.5 * kappa);
    const double imag = probe > 0.0 && probe != kappa ? g_at(probe, p).imag() : std::numeric_limits<double>::infinity();
    throw RegionError("search interval reaches into the essential spectrum (kappa_b <= kappa)", imag);
  }

  auto residual = [&](double kb) { return bound_state_residual(BindingParameter(kb), c, p); };

  const std::vector<double> grid = geometric_grid(kappa, search, options.grid_points);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = residual(grid[i]);

  std::vector<std::pair<double, int>> roots;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (values[i] == 0.0) {
      roots.emplace_back(grid[i], 1);
      continue;
    }
    if (i + 1 < grid.size() && values[i + 1] != 0.0 && (values[i] < 0.0) != (values[i + 1] < 0.0)) {
      roots.emplace_back(bisect(residual, grid[i], grid[i + 1], values[i]), 1);
      continue;
    }
    if (i > 0 && i + 1 < grid.size()) {
      const double a = std::abs(values[i - 1]);
      const double b = std::abs(values[i]);
      const double e = std::abs(values[i + 1]);
      const bool same_sign = (values[i - 1] < 0.0) == (values[i] < 0.0) && (values[i] < 0.0) == (values[i + 1] < 0.0);
      if (same_sign && b <= a && b <= e) {
        const double kb = golden_minimum([&](double x) { return std::abs(residual(x)); }, grid[i - 1], grid[i + 1]);
        if (std::abs(residual(kb)) < options.tangency_threshold) roots.emplace_back(kb, 2);
      }
    }
  }

  const CouplingMatrices matrices = c.matrices();
  std::vector<BoundState> out;
  out.reserve(roots.size());
  for (const auto& [kb, multiplicity] : roots) {
    const BindingParameter binding(kb);
    BoundState s;
    s.kappa_b = kb;
    s.energy = binding.energy();
    s.residual = residual(kb);
    s.singular_ratio = duality_ratio(binding, matrices, p, &s.check);
    s.multiplicity = multiplicity;
    out.push_back(s);
  }
  return out;
}

double design_coupling_for_eigenvalue(double target_energy, double a, Complex c, const SpinOrbitParams& p) {
  if (!(target_energy < 0.0) || !std::isfinite(target_energy)) {
    throw std::invalid_argument("target energy must be negative");
  }
  const double kappa0 = std::sqrt(-target_energy);
  if (kappa0 + a == 0.0) throw DomainError("degenerate design: kappa_0 + a = 0 leaves d undetermined");
  const double g = real_renormalized_green(BindingParameter(kappa0), p);
  return g + std::norm(c) / (kappa0 + a);
}

RealityReport measure_reality_region(const SpinOrbitParams& p, int samples) {
  if (samples < 2) throw std::invalid_argument("reality scan needs at least two samples");
  RealityReport report;
  report.kappa = p.kappa();
  const double kappa = p.kappa();

  if (kappa > 0.0) {
    for (int j = 0; j < samples; ++j) {
      const double kb = kappa * (j + 0.5) / samples;
      const double im = g_at(kb, p).imag();
      report.below_threshold.push_back({kb, im});
      report.max_imag_below = std::max(report.max_imag_below, std::abs(im));
    }
  }
  const auto grid = geometric_grid(kappa, default_search_interval(p), samples);
  for (double kb : grid) {
    const double im = g_at(kb, p).imag();
    report.above_threshold.push_back({kb, im});
    report.max_imag_above = std::max(report.max_imag_above, std::abs(im));
  }
  report.real_below_essential_spectrum = report.max_imag_above < kRealityTolerance;
  report.real_on_reference_interval = report.max_imag_below < kRealityTolerance;
  return report;
}

}  // namespace hybrid

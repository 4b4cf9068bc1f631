#include "hybrid/scattering.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "hybrid/errors.hpp"
#include "hybrid/resolvent.hpp"

namespace hybrid {

namespace {

constexpr Complex kI(0.0, 1.0);

// -[(a + i q)(g - d) + |c|^2] / [(a - i q)(g - d) + |c|^2]
Complex reflection_formula(Complex q, Complex g, double a, Complex c, double d) {
  const Complex shifted = g - d;
  const double c2 = std::norm(c);
  const Complex num = (a + kI * q) * shifted + c2;
  const Complex den = (a - kI * q) * shifted + c2;
  const double scale = std::abs((a - kI * q) * shifted) + c2;
  if (!(std::abs(den) > 1e-14 * scale)) {
    throw DomainError("reflection amplitude: pole on the real axis (vanishing denominator)");
  }
  return -num / den;
}

ReflectionResult make_result(Complex r) {
  const double prob = std::norm(r);
  return {r, prob, 1.0 - prob};
}

}  // namespace

ScatteringMomentum::ScatteringMomentum(double k) : k_(k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("scattering momentum must be > 0");
}

ReflectionResult reflection_amplitude(const ScatteringMomentum& k, const SpinIndependentCoupling& c,
                                      const SpinOrbitParams& p) {
  const Complex g = renormalized_green_scalar(k.energy(), p);
  return make_result(reflection_formula(k.value(), g, c.a, c.c, c.d));
}

Complex spinless_reference_reflection(const ScatteringMomentum& k, double a, Complex c, double d) {
  return reflection_formula(k.value(), q_helper(k.energy()), a, c, d);
}

Complex reflection_amplitude_at(const SpectralPoint& z, const SpinIndependentCoupling& c, const SpinOrbitParams& p) {
  return reflection_formula(lead_momentum(z), renormalized_green_scalar(z, p), c.a, c.c, c.d);
}

Complex reflection_epsilon_ladder(const ScatteringMomentum& k, const SpinIndependentCoupling& c,
                                  const SpinOrbitParams& p, std::span<const double> eps) {
  static constexpr std::array<double, 3> kDefault{1e-4, 1e-6, 1e-8};
  if (eps.empty()) eps = kDefault;
  const std::size_t n = eps.size();
  std::vector<Complex> table(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(eps[i] > 0.0)) throw std::invalid_argument("epsilon ladder entries must be positive");
    table[i] = reflection_amplitude_at(SpectralPoint::at(Complex(k.value() * k.value(), eps[i])), c, p);
  }
  // Neville's scheme evaluated at eps = 0.
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = n - 1; i >= level; --i) {
      const double e_hi = eps[i - level];
      const double e_lo = eps[i];
      table[i] = (e_hi * table[i] - e_lo * table[i - 1]) / (e_hi - e_lo);
    }
  }
  return table[n - 1];
}

ScatteringState scattering_state(const ScatteringMomentum& k, const Spinor& spin, std::span<const LeadPoint> lead_samples,
                                 std::span<const PlanePoint> plane_samples, const CouplingMatrices& m,
                                 const SpinOrbitParams& p) {
  if (spin.norm() == 0.0) throw DomainError("scattering state: incident spinor is zero");
  const SpectralPoint z = k.energy();
  const Resolvent resolvent(z, p, m);

  BoundaryVector u = BoundaryVector::Zero();
  u.head<2>() = spin;

  ScatteringState state;
  state.k = k.value();
  state.incident_spin = spin;
  state.weights = resolvent.denominator().inverse * u;

  state.lead.reserve(lead_samples.size());
  for (const LeadPoint& x : lead_samples) {
    const Spinor incident = std::cos(k.value() * x.x) * spin;
    state.lead.push_back({x, incident - trace_kernel(x, z, p) * state.weights});
  }
  state.plane.reserve(plane_samples.size());
  for (const PlanePoint& x : plane_samples) {
    state.plane.push_back({x, -(trace_kernel(x, z, p) * state.weights)});
  }
  return state;
}

ScatteringState scattering_state(const ScatteringMomentum& k, const Spinor& spin, std::span<const LeadPoint> lead_samples,
                                 std::span<const PlanePoint> plane_samples, const SpinIndependentCoupling& c,
                                 const SpinOrbitParams& p) {
  return scattering_state(k, spin, lead_samples, plane_samples, c.matrices(), p);
}

Complex FarFieldFit::ratio() const {
  const Complex norm = incoming.squaredNorm();
  if (norm == 0.0) throw DomainError("far-field fit: incoming amplitude vanishes");
  return incoming.dot(outgoing) / norm;
}

FarFieldFit fit_lead_far_field(const ScatteringState& state) {
  const double k = state.k;
  const double lo = 5.0 / k;
  const double hi = 50.0 / k;
  std::vector<const LeadSample*> window;
  for (const auto& s : state.lead) {
    if (s.point.x >= lo * (1.0 - 1e-12) && s.point.x <= hi * (1.0 + 1e-12)) window.push_back(&s);
  }
  if (window.size() < 64) throw std::invalid_argument("far-field fit needs at least 64 samples in [5/k, 50/k]");

  const Eigen::Index n = static_cast<Eigen::Index>(window.size());
  Eigen::MatrixX2cd basis(n, 2);
  Eigen::MatrixX2cd values(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = window[i]->point.x;
    basis(i, 0) = std::exp(-kI * (k * x));
    basis(i, 1) = std::exp(kI * (k * x));
    values.row(i) = window[i]->value.transpose();
  }
  const auto qr = basis.colPivHouseholderQr();
  const Eigen::Matrix2cd coeffs = qr.solve(values);  // rows: alpha, beta; columns: spin

  FarFieldFit fit;
  fit.incoming = coeffs.row(0).transpose();
  fit.outgoing = coeffs.row(1).transpose();
  fit.residual = (basis * coeffs - values).cwiseAbs().maxCoeff();
  fit.samples = static_cast<int>(n);
  return fit;
}

std::vector<LeadPoint> far_field_window(double k, int n) {
  if (!(k > 0.0) || n < 2) throw std::invalid_argument("far_field_window: need k > 0 and n >= 2");
  std::vector<LeadPoint> pts(static_cast<std::size_t>(n));
  const double lo = 5.0 / k;
  const double hi = 50.0 / k;
  for (int i = 0; i < n; ++i) pts[i].x = lo + (hi - lo) * i / (n - 1);
  return pts;
}

}  // namespace hybrid

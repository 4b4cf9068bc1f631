#include "hybrid/resolvent.hpp"

#include "hybrid/errors.hpp"

namespace hybrid {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr LeadPoint kLeadEnd{0.0};
constexpr PlanePoint kOrigin{0.0, 0.0};

void reject_junction(const ConfigPoint& p) {
  std::visit(Overloaded{[](const LeadPoint& x) {
                          if (x.x == 0.0) throw DomainError("trace kernel evaluated at the junction (lead end)");
                        },
                        [](const PlanePoint& x) {
                          if (x.x1 == 0.0 && x.x2 == 0.0) {
                            throw DomainError("trace kernel evaluated at the junction (plane origin)");
                          }
                        }},
             p);
}

}  // namespace

TraceBlock trace_kernel(const ConfigPoint& p, const SpectralPoint& z, const SpinOrbitParams& so) {
  reject_junction(p);
  TraceBlock t = TraceBlock::Zero();
  std::visit(Overloaded{[&](const LeadPoint& x) {
                          t.leftCols<2>() = lead_green(x, kLeadEnd, z) * pauli::sigma0();
                        },
                        [&](const PlanePoint& x) { t.rightCols<2>() = spin_orbit_green(x, kOrigin, z, so); }},
             p);
  return t;
}

AdjointTraceBlock adjoint_trace_kernel(const ConfigPoint& p, const SpectralPoint& z, const SpinOrbitParams& so) {
  reject_junction(p);
  AdjointTraceBlock t = AdjointTraceBlock::Zero();
  std::visit(Overloaded{[&](const LeadPoint& x) {
                          t.topRows<2>() = lead_green(kLeadEnd, x, z) * pauli::sigma0();
                        },
                        [&](const PlanePoint& x) { t.bottomRows<2>() = spin_orbit_green(kOrigin, x, z, so); }},
             p);
  return t;
}

SpinMatrix2 decoupled_green(const ConfigPoint& p, const ConfigPoint& p_prime, const SpectralPoint& z,
                            const SpinOrbitParams& so) {
  return std::visit(
      Overloaded{[&](const LeadPoint& x, const LeadPoint& y) -> SpinMatrix2 {
                   return lead_green(x, y, z) * pauli::sigma0();
                 },
                 [&](const PlanePoint& x, const PlanePoint& y) -> SpinMatrix2 { return spin_orbit_green(x, y, z, so); },
                 [](const auto&, const auto&) -> SpinMatrix2 { return SpinMatrix2::Zero(); }},
      p, p_prime);
}

Resolvent::Resolvent(const SpectralPoint& z, const SpinOrbitParams& so, const CouplingMatrices& m)
    : z_(z), so_(so), denominator_(krein_denominator(z, so, tilde_transform(m))) {}

SpinMatrix2 Resolvent::correction(const ConfigPoint& p, const ConfigPoint& p_prime) const {
  return trace_kernel(p, z_, so_) * denominator_.inverse * adjoint_trace_kernel(p_prime, z_, so_);
}

SpinMatrix2 Resolvent::operator()(const ConfigPoint& p, const ConfigPoint& p_prime) const {
  return decoupled_green(p, p_prime, z_, so_) - correction(p, p_prime);
}

SpinMatrix2 full_green(const ConfigPoint& p, const ConfigPoint& p_prime, const SpectralPoint& z,
                       const SpinOrbitParams& so, const CouplingMatrices& m) {
  return Resolvent(z, so, m)(p, p_prime);
}

}  // namespace hybrid

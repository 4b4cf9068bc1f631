#pragma once

#include <Eigen/Dense>

#include "hybrid/specfun.hpp"

namespace hybrid {

/// 2x2 complex matrix over spin space.
using SpinMatrix2 = Eigen::Matrix2cd;
/// Two-component spinor.
using Spinor = Eigen::Vector2cd;

namespace pauli {

inline SpinMatrix2 sigma0() { return SpinMatrix2::Identity(); }

inline SpinMatrix2 sigma1() {
  SpinMatrix2 m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline SpinMatrix2 sigma2() {
  const Complex i(0.0, 1.0);
  SpinMatrix2 m;
  m << 0.0, -i, i, 0.0;
  return m;
}

inline SpinMatrix2 sigma3() {
  SpinMatrix2 m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

}  // namespace pauli

inline Spinor spin_up() { return Spinor(1.0, 0.0); }
inline Spinor spin_down() { return Spinor(0.0, 1.0); }

// Largest entrywise modulus of a - b.
template <class A, class B>
double max_abs_diff(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace hybrid

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "slipgap/ctrl_model.hpp"
#include "slipgap/linalg.hpp"

// Luenberger observer for x2 = alpha_r. x1 is directly measurable, so the
// default (hybrid) mode substitutes the measured x1 each step and the
// observer effectively estimates only x2.

namespace slipgap {

struct observer_design_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Rank of the 4x2 observability matrix [C; CA], judged against the scale
// of its entries.
inline bool observable(const Mat2& A, const Mat2& C) {
  const Mat2 CA = C * A;
  double rows[4][2] = {{C(0, 0), C(0, 1)},
                       {C(1, 0), C(1, 1)},
                       {CA(0, 0), CA(0, 1)},
                       {CA(1, 0), CA(1, 1)}};
  double scale = 0.0;
  for (auto& r : rows)
    for (double v : r) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return false;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      const double minor = rows[i][0] * rows[j][1] - rows[i][1] * rows[j][0];
      if (std::abs(minor) > 1e-9 * scale * scale) return true;
    }
  return false;
}

// A real 2x2 matrix with the requested eigenvalue pair, expressed in the
// eigenbasis of A where possible so that requesting eig(A) returns A itself
// (and therefore zero gain).
inline Mat2 target_closed_loop(const Mat2& A, std::complex<double> p1, std::complex<double> p2) {
  const auto eig = A.eigenvalues();
  const bool want_complex = std::abs(p1.imag()) > 0.0;
  if (want_complex && std::abs(p1.real() - p2.real()) + std::abs(p1.imag() + p2.imag()) > 1e-12)
    throw observer_design_error("design_observer_gain: complex poles must be a conjugate pair");

  // Basis columns (u, w) with A = T * R * T^-1 for the canonical real form R.
  Mat2 T = Mat2::identity();
  bool have_basis = false;

  if (std::abs(eig[0].imag()) > 1e-12) {
    // A has a complex pair: real invariant basis from Re/Im of an eigenvector.
    const std::complex<double> lam = eig[1];  // a + bi with b > 0
    std::complex<double> v0, v1;
    if (std::abs(A(0, 1)) > 1e-14 * A.frobenius_norm()) {
      v0 = A(0, 1);
      v1 = lam - A(0, 0);
    } else {
      v0 = lam - A(1, 1);
      v1 = A(1, 0);
    }
    T(0, 0) = v0.real();
    T(1, 0) = v1.real();
    T(0, 1) = v0.imag();
    T(1, 1) = v1.imag();
    have_basis = std::abs(T.det()) > 1e-14;
  } else if (std::abs(eig[0].real() - eig[1].real()) >
             1e-9 * (1.0 + std::abs(eig[0].real()) + std::abs(eig[1].real()))) {
    // Real distinct eigenvalues: eigenvector basis.
    for (int k = 0; k < 2; ++k) {
      const double lam = eig[k].real();
      double v0, v1;
      if (std::abs(A(0, 1)) > 1e-14 * (1.0 + A.frobenius_norm())) {
        v0 = A(0, 1);
        v1 = lam - A(0, 0);
      } else if (std::abs(A(1, 0)) > 1e-14 * (1.0 + A.frobenius_norm())) {
        v0 = lam - A(1, 1);
        v1 = A(1, 0);
      } else {
        v0 = (k == 0) ? 1.0 : 0.0;
        v1 = (k == 0) ? 0.0 : 1.0;
      }
      T(0, k) = v0;
      T(1, k) = v1;
    }
    have_basis = std::abs(T.det()) > 1e-14;
  }
  if (!have_basis) T = Mat2::identity();

  Mat2 K;  // canonical form with the desired eigenvalues
  if (want_complex) {
    const double a = p1.real();
    const double b = std::abs(p1.imag());
    K = {{{a, b}, {-b, a}}};
  } else if (std::abs(p1.real() - p2.real()) <
             1e-9 * (1.0 + std::abs(p1.real()) + std::abs(p2.real()))) {
    // Repeated real pole: Jordan block (defective closed loop is fine).
    const double pr = p1.real();
    K = {{{pr, 1.0}, {0.0, pr}}};
  } else {
    K = {{{p1.real(), 0.0}, {0.0, p2.real()}}};
  }
  return T * K * T.inverse();
}

}  // namespace detail

// Pole placement for the 2x2 observer: pick the closed-loop matrix M with
// the requested spectrum and solve A - l*C = M for the gain.
inline Mat2 design_observer_gain(const CtrlModel& m, std::complex<double> p1,
                                 std::complex<double> p2) {
  if (p1.real() >= 0.0 || p2.real() >= 0.0)
    throw observer_design_error("design_observer_gain: poles must have negative real parts");
  if (!detail::observable(m.A_c, m.C_c))
    throw observer_design_error("design_observer_gain: (A_c, C_c) is not observable");
  if (std::abs(m.C_c.det()) < 1e-12 * (1.0 + m.C_c.frobenius_norm()))
    throw observer_design_error("design_observer_gain: C_c is numerically singular");

  const Mat2 M = detail::target_closed_loop(m.A_c, p1, p2);
  return (m.A_c - M) * m.C_c.inverse();
}

inline Mat2 design_observer_gain(const CtrlModel& m, double p1, double p2) {
  return design_observer_gain(m, std::complex<double>(p1, 0.0), std::complex<double>(p2, 0.0));
}

struct ObserverState {
  Vec2 x_hat;
  Mat2 l_gain;
  bool hybrid_x1 = true;  // substitute the measured x1 each step
  bool fault = false;
};

// Euler step of the observer ODE. The innovation is formed from the raw
// measurement: y - (C*x_hat + D). Non-finite measurements hold the previous
// estimate and raise the fault flag.
inline void observer_update(ObserverState& o, const CtrlModel& m, double u, const Vec2& y_meas,
                            double dt, double x1_meas = 0.0) {
  if (!(dt > 0.0)) throw std::invalid_argument("observer_update: dt must be positive");
  if (!y_meas.finite()) {
    o.fault = true;
    return;
  }
  o.fault = false;
  const Vec2 y_hat = m.C_c * o.x_hat + m.D_c;
  const Vec2 innovation = y_meas - y_hat;
  const Vec2 xdot = m.A_c * o.x_hat + m.B_c * u + m.E_c + o.l_gain * innovation;
  o.x_hat = o.x_hat + xdot * dt;
  if (o.hybrid_x1) o.x_hat[0] = x1_meas;
}

}  // namespace slipgap

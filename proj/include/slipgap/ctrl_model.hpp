#pragma once

#include <cmath>
#include <stdexcept>

#include "slipgap/linalg.hpp"
#include "slipgap/params.hpp"

// Control-oriented LTI model in sideslip-difference coordinates
// x = [alpha_f - alpha_r, alpha_r]', input u = M_z, output y = [r, a_y]'.
// A, B, C depend only on v_x; the affine terms E, D carry the driver input.

namespace slipgap {

struct CtrlModel {
  // Continuous-time matrices.
  Mat2 A_c;
  Vec2 B_c;
  Vec2 E_c;
  Mat2 C_c;
  Vec2 D_c;
  // Discrete counterparts (forward Euler at T_s).
  Mat2 A_d;
  Vec2 B_d;
  Vec2 E_d;
  Mat2 C_d;
  Vec2 D_d;

  double v_x = 0.0;
  double T_s = 0.0;

  bool finite() const {
    return A_c.finite() && B_c.finite() && E_c.finite() && C_c.finite() && D_c.finite();
  }
};

inline CtrlModel build_continuous(const VehicleParams& p, double v_x, double delta_f,
                                  double delta_f_dot) {
  if (!(v_x > 0.0)) throw std::invalid_argument("build_continuous: v_x must be positive");
  const double L = p.wheelbase();

  CtrlModel m;
  m.v_x = v_x;

  m.A_c(0, 0) = -p.l_f * p.C_f * L / (p.I_z * v_x);
  m.A_c(0, 1) = L / (p.I_z * v_x) * (-p.l_f * p.C_f + p.l_r * p.C_r);
  m.A_c(1, 0) = -p.C_f / (p.m * v_x) + p.l_f * p.l_r * p.C_f / (p.I_z * v_x) - v_x / L;
  m.A_c(1, 1) = -(p.C_f + p.C_r) / (p.m * v_x) + p.l_f * p.l_r * p.C_f / (p.I_z * v_x) -
                p.l_r * p.l_r * p.C_r / (p.I_z * v_x);

  m.B_c[0] = L / (p.I_z * v_x);
  m.B_c[1] = -p.l_r / (p.I_z * v_x);

  m.E_c[0] = -delta_f_dot;
  m.E_c[1] = -v_x / L * delta_f;

  m.C_c(0, 0) = v_x / L;
  m.C_c(0, 1) = 0.0;
  m.C_c(1, 0) = -p.C_f / p.m;
  m.C_c(1, 1) = -(p.C_f + p.C_r) / p.m;

  m.D_c[0] = v_x / L * delta_f;
  m.D_c[1] = 0.0;

  return m;
}

inline void discretize(CtrlModel& m, double T_s) {
  if (!(T_s > 0.0)) throw std::invalid_argument("discretize: T_s must be positive");
  m.T_s = T_s;
  m.A_d = Mat2::identity() + m.A_c * T_s;
  m.B_d = m.B_c * T_s;
  m.E_d = m.E_c * T_s;
  m.C_d = m.C_c;
  m.D_d = m.D_c;
}

inline CtrlModel build_model(const VehicleParams& p, double v_x, double delta_f,
                             double delta_f_dot) {
  CtrlModel m = build_continuous(p, v_x, delta_f, delta_f_dot);
  discretize(m, p.T_s);
  return m;
}

inline CtrlModel build_model(const VehicleParams& p, double v_x, double delta_f,
                             double delta_f_dot, double T_s) {
  CtrlModel m = build_continuous(p, v_x, delta_f, delta_f_dot);
  discretize(m, T_s);
  return m;
}

// x1 = alpha_f - alpha_r from production-vehicle sensors only (no beta).
inline double measure_x1(double r, double delta_f, double v_x, const VehicleParams& p) {
  if (!(v_x > 0.0)) throw std::invalid_argument("measure_x1: v_x must be positive");
  return p.wheelbase() / v_x * r - delta_f;
}

// Steer rate from the commanded angle: finite difference smoothed by a
// first-order low-pass (sensors give the angle only).
class SteerRateFilter {
 public:
  explicit SteerRateFilter(double time_constant = 0.02) : tau_(time_constant) {}

  double update(double delta_f, double dt) {
    if (!primed_) {
      prev_ = delta_f;
      primed_ = true;
      return rate_;
    }
    const double raw = (delta_f - prev_) / dt;
    prev_ = delta_f;
    const double a = dt / (tau_ + dt);
    rate_ += a * (raw - rate_);
    return rate_;
  }

  double rate() const { return rate_; }

 private:
  double tau_;
  double prev_ = 0.0;
  double rate_ = 0.0;
  bool primed_ = false;
};

}  // namespace slipgap

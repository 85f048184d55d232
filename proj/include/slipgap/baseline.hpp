#pragma once

#include <algorithm>
#include <cmath>

#include "slipgap/params.hpp"

// The comparison controller: a first-order sliding-surface law on the
// sideslip-difference error, with linear-band tire-force feedforward. No
// prediction, no constraint handling; it is clamped to the same actuator
// envelope as the predictive controller for a fair comparison.

namespace slipgap {

struct SlidingConfig {
  double lambda = 5.0;                // convergence gain [1/s]
  double zeta = 0.5 * M_PI / 180.0;   // target |x1| gap [rad], shared with the MPC

  void validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("SlidingConfig: lambda must be positive");
  }
};

inline double sign_plus(double x) { return (x >= 0.0) ? 1.0 : -1.0; }  // sign(0) := +1

inline double sliding_surface(double x1, double zeta) { return sign_plus(x1) * x1 - zeta; }

struct SlidingStepResult {
  double M_z = 0.0;
  double M_z_unclamped = 0.0;
  double surface = 0.0;
  bool clamped = false;
};

// Control law enforcing s_dot = -lambda*s on the design model. Tire forces
// enter through the linear-band estimates F = -C*alpha with alpha from the
// observer; in deep saturation these estimates drift, which is exactly the
// regime the comparison is meant to expose.
inline SlidingStepResult sliding_control(double x1, double delta_f_dot, double alpha_f_est,
                                         double alpha_r_est, const VehicleParams& p, double v_x,
                                         const SlidingConfig& cfg, double u_min, double u_max) {
  cfg.validate();
  const double L = p.wheelbase();
  const double F_yf = -p.C_f * alpha_f_est;
  const double F_yr = -p.C_r * alpha_r_est;
  const double s = sliding_surface(x1, cfg.zeta);
  const double gain = p.I_z * v_x / L;

  SlidingStepResult out;
  out.surface = s;
  out.M_z_unclamped =
      -p.l_f * F_yf + p.l_r * F_yr + gain * delta_f_dot - sign_plus(x1) * gain * cfg.lambda * s;
  out.M_z = std::clamp(out.M_z_unclamped, u_min, u_max);
  out.clamped = out.M_z != out.M_z_unclamped;
  return out;
}

}  // namespace slipgap

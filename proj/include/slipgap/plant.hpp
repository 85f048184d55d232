#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "slipgap/params.hpp"

// Ground-truth nonlinear bicycle simulator. This stands in for a full
// vehicle-dynamics package: saturating lateral tires, constant longitudinal
// speed, RK4 integration, plus global pose for path scenarios.

namespace slipgap {

struct simulation_fault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Piecewise-affine lateral force law per axle. Sign convention: F = -C*alpha
// in the linear band, odd and continuous, with a reduced post-saturation
// slope. Friction scales the saturation onset, not the linear stiffness.
struct TireCurve {
  double C = 150000.0;    // linear cornering stiffness [N/rad]
  double alpha_p = 0.0;   // saturation onset [rad] (already friction-scaled)
  double d_post = 0.0;    // post-saturation slope [N/rad]
  double mu = 1.0;        // road friction [-]

  static constexpr double kFrontAlphaRefDeg = 6.0;
  static constexpr double kRearAlphaRefDeg = 7.0;
  static constexpr double kPostSlopeRatio = 0.05;

  static TireCurve front(const VehicleParams& p, double mu) {
    return make(p.C_f, kFrontAlphaRefDeg, mu);
  }
  static TireCurve rear(const VehicleParams& p, double mu) {
    return make(p.C_r, kRearAlphaRefDeg, mu);
  }

  static TireCurve make(double C, double alpha_ref_deg, double mu) {
    TireCurve t;
    t.C = C;
    t.mu = mu;
    t.alpha_p = mu * alpha_ref_deg * M_PI / 180.0;
    t.d_post = kPostSlopeRatio * C;
    t.validate();
    return t;
  }

  void validate() const {
    if (!(C > 0.0)) throw std::invalid_argument("TireCurve: C must be positive");
    if (!(alpha_p > 0.0)) throw std::invalid_argument("TireCurve: alpha_p must be positive");
    if (d_post < 0.0 || d_post >= C) throw std::invalid_argument("TireCurve: need 0 <= d_post < C");
    if (!(mu > 0.0) || mu > 1.2) throw std::invalid_argument("TireCurve: need 0 < mu <= 1.2");
  }
};

inline double tire_force(const TireCurve& t, double alpha) {
  const double a = std::abs(alpha);
  const double mag = (a <= t.alpha_p) ? t.C * a : t.C * t.alpha_p + t.d_post * (a - t.alpha_p);
  return (alpha >= 0.0) ? -mag : mag;
}

struct PlantState {
  double beta = 0.0;  // body sideslip [rad]
  double r = 0.0;     // yaw rate [rad/s]
  double psi = 0.0;   // heading [rad]
  double X = 0.0;     // global position [m]
  double Y = 0.0;
  double v_x = 18.06;  // longitudinal speed [m/s], held constant
};

struct DriverInput {
  double delta_f = 0.0;      // road-wheel steer [rad]
  double delta_f_dot = 0.0;  // steer rate [rad/s]
};

inline std::pair<double, double> wheel_sideslips(const PlantState& s, const DriverInput& u,
                                                 const VehicleParams& p) {
  if (!(s.v_x > 0.0)) throw std::invalid_argument("wheel_sideslips: v_x must be positive");
  const double alpha_f = s.beta + p.l_f / s.v_x * s.r - u.delta_f;
  const double alpha_r = s.beta - p.l_r / s.v_x * s.r;
  return {alpha_f, alpha_r};
}

struct PlantDerivatives {
  double beta_dot = 0.0;
  double r_dot = 0.0;
};

// Bicycle model with cos(delta_f) ~ 1 (small steer angles).
inline PlantDerivatives derivatives(const PlantState& s, const DriverInput& u, double M_z,
                                    const TireCurve& front, const TireCurve& rear,
                                    const VehicleParams& p) {
  const auto [alpha_f, alpha_r] = wheel_sideslips(s, u, p);
  const double F_yf = tire_force(front, alpha_f);
  const double F_yr = tire_force(rear, alpha_r);
  PlantDerivatives d;
  d.beta_dot = (F_yf + F_yr) / (p.m * s.v_x) - s.r;
  d.r_dot = (p.l_f * F_yf - p.l_r * F_yr + M_z) / p.I_z;
  if (!std::isfinite(d.beta_dot) || !std::isfinite(d.r_dot))
    throw simulation_fault("derivatives: non-finite result");
  return d;
}

inline double lateral_acceleration(const PlantState& s, const DriverInput& u,
                                   const TireCurve& front, const TireCurve& rear,
                                   const VehicleParams& p) {
  const auto [alpha_f, alpha_r] = wheel_sideslips(s, u, p);
  return (tire_force(front, alpha_f) + tire_force(rear, alpha_r)) / p.m;
}

namespace detail {
// State derivative including pose kinematics (constant v_x).
struct FullDeriv {
  double beta_dot, r_dot, psi_dot, X_dot, Y_dot;
};

inline FullDeriv full_derivatives(const PlantState& s, const DriverInput& u, double M_z,
                                  const TireCurve& front, const TireCurve& rear,
                                  const VehicleParams& p) {
  const PlantDerivatives d = derivatives(s, u, M_z, front, rear, p);
  FullDeriv f;
  f.beta_dot = d.beta_dot;
  f.r_dot = d.r_dot;
  f.psi_dot = s.r;
  const double tb = std::tan(s.beta);
  f.X_dot = s.v_x * (std::cos(s.psi) - tb * std::sin(s.psi));
  f.Y_dot = s.v_x * (std::sin(s.psi) + tb * std::cos(s.psi));
  return f;
}
}  // namespace detail

// One fixed RK4 step; v_x stays exactly constant. Sanity bounds guard
// against a diverged run poisoning downstream statistics.
inline PlantState plant_step(const PlantState& s, const DriverInput& u, double M_z, double dt,
                             const TireCurve& front, const TireCurve& rear,
                             const VehicleParams& p) {
  if (!(dt > 0.0)) throw std::invalid_argument("plant_step: dt must be positive");

  auto add = [&](const PlantState& base, const detail::FullDeriv& k, double h) {
    PlantState n = base;
    n.beta = s.beta + h * k.beta_dot;
    n.r = s.r + h * k.r_dot;
    n.psi = s.psi + h * k.psi_dot;
    n.X = s.X + h * k.X_dot;
    n.Y = s.Y + h * k.Y_dot;
    return n;
  };

  const auto k1 = detail::full_derivatives(s, u, M_z, front, rear, p);
  const auto k2 = detail::full_derivatives(add(s, k1, dt / 2.0), u, M_z, front, rear, p);
  const auto k3 = detail::full_derivatives(add(s, k2, dt / 2.0), u, M_z, front, rear, p);
  const auto k4 = detail::full_derivatives(add(s, k3, dt), u, M_z, front, rear, p);

  PlantState n = s;
  n.beta = s.beta + dt / 6.0 * (k1.beta_dot + 2.0 * k2.beta_dot + 2.0 * k3.beta_dot + k4.beta_dot);
  n.r = s.r + dt / 6.0 * (k1.r_dot + 2.0 * k2.r_dot + 2.0 * k3.r_dot + k4.r_dot);
  n.psi = s.psi + dt / 6.0 * (k1.psi_dot + 2.0 * k2.psi_dot + 2.0 * k3.psi_dot + k4.psi_dot);
  n.X = s.X + dt / 6.0 * (k1.X_dot + 2.0 * k2.X_dot + 2.0 * k3.X_dot + k4.X_dot);
  n.Y = s.Y + dt / 6.0 * (k1.Y_dot + 2.0 * k2.Y_dot + 2.0 * k3.Y_dot + k4.Y_dot);

  if (!std::isfinite(n.beta) || !std::isfinite(n.r) || std::abs(n.beta) > 1.0 ||
      std::abs(n.r) > 20.0)
    throw simulation_fault("plant_step: state diverged");
  return n;
}

}  // namespace slipgap

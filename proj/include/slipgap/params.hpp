#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace slipgap {

// Physical constants of the vehicle. Immutable after construction; share by
// value. Defaults correspond to a B-class EV with rear in-wheel motors.
struct VehicleParams {
  double m = 1140.0;      // total mass [kg]
  double l_f = 1.165;     // CG to front axle [m]
  double l_r = 1.165;     // CG to rear axle [m]
  double C_f = 150000.0;  // front cornering stiffness [N/rad]
  double C_r = 170000.0;  // rear cornering stiffness [N/rad]
  double I_z = 1140.0 * 1.165 * 1.165;  // yaw inertia [kg m^2], dynamic-index-1 default
  double r_w = 0.333;     // tire radius [m]
  double l_w = 1.481;     // track width [m]
  double g = 9.81;        // [m/s^2]
  double T_s = 0.005;     // control sampling period [s]

  double wheelbase() const { return l_f + l_r; }

  void validate() const {
    auto pos = [](double x, const char* name) {
      if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument(std::string("VehicleParams: ") + name + " must be strictly positive");
    };
    pos(m, "m");
    pos(l_f, "l_f");
    pos(l_r, "l_r");
    pos(C_f, "C_f");
    pos(C_r, "C_r");
    pos(I_z, "I_z");
    pos(r_w, "r_w");
    pos(l_w, "l_w");
    pos(g, "g");
    pos(T_s, "T_s");
  }
};

// Understeer gain: positive means the vehicle is understeering by design,
// which is the premise the controller relies on.
inline double understeer_gain(const VehicleParams& p) {
  const double L = p.wheelbase();
  return p.m * p.l_r / (p.C_f * L) - p.m * p.l_f / (p.C_r * L);
}

// Static motor torque envelope: constant peak torque below the base speed,
// power-limited above it. Symmetric in sign (T_min = -T_max). Stored as a
// sampled (wheel speed, torque) table with linear interpolation so measured
// envelopes can be dropped in unchanged.
struct MotorTorqueCurve {
  double T_base = 300.0;   // peak torque per wheel [N m]
  double P_max = 40000.0;  // power cap per wheel [W]
  std::vector<std::pair<double, double>> table;  // (wheel speed [rad/s], T_max [N m])

  static MotorTorqueCurve from_envelope(double T_base, double P_max,
                                        double omega_max = 250.0, int knots = 64) {
    if (!(T_base >= 0.0) || !(P_max > 0.0) || !(omega_max > 0.0) || knots < 2)
      throw std::invalid_argument("MotorTorqueCurve: bad envelope parameters");
    MotorTorqueCurve c;
    c.T_base = T_base;
    c.P_max = P_max;
    const double omega_base = (T_base > 0.0) ? P_max / T_base : 0.0;
    c.table.emplace_back(0.0, T_base);
    if (omega_base > 0.0 && omega_base < omega_max) {
      c.table.emplace_back(omega_base, T_base);
      for (int i = 1; i <= knots; ++i) {
        const double w = omega_base + (omega_max - omega_base) * i / knots;
        c.table.emplace_back(w, P_max / w);
      }
    } else {
      c.table.emplace_back(omega_max, T_base);
    }
    c.validate();
    return c;
  }

  void validate() const {
    if (table.size() < 2) throw std::invalid_argument("MotorTorqueCurve: table needs >= 2 points");
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (table[i].second < 0.0) throw std::invalid_argument("MotorTorqueCurve: negative torque entry");
      if (i > 0) {
        if (table[i].first <= table[i - 1].first)
          throw std::invalid_argument("MotorTorqueCurve: speeds must be strictly increasing");
        if (table[i].second > table[i - 1].second + 1e-12)
          throw std::invalid_argument("MotorTorqueCurve: torque must be non-increasing in speed");
      }
    }
  }

  // Linear interpolation over the table; clamps outside the sampled range.
  double max_torque(double omega) const {
    if (omega <= table.front().first) return table.front().second;
    if (omega >= table.back().first) return table.back().second;
    for (std::size_t i = 1; i < table.size(); ++i) {
      if (omega <= table[i].first) {
        const double w0 = table[i - 1].first, w1 = table[i].first;
        const double t0 = table[i - 1].second, t1 = table[i].second;
        return t0 + (t1 - t0) * (omega - w0) / (w1 - w0);
      }
    }
    return table.back().second;  // unreachable
  }
};

inline double max_motor_torque(const MotorTorqueCurve& curve, double v_x, double r_w) {
  if (v_x < 0.0) throw std::invalid_argument("max_motor_torque: v_x must be >= 0");
  return curve.max_torque(v_x / r_w);
}

}  // namespace slipgap

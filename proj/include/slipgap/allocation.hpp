#pragma once

#include <cmath>
#include <stdexcept>

#include "slipgap/params.hpp"

// Daisy-chain torque allocation: the commanded yaw moment is produced with
// propulsive (positive) torque on a single wheel whenever possible; negative
// torque on the opposite wheel engages only for the remainder.

namespace slipgap {

struct TorqueCommand {
  double T_rl = 0.0;  // rear-left motor torque [N m]
  double T_rr = 0.0;  // rear-right motor torque [N m]
  int branch = 0;     // allocation branch taken (1..4), 0 when idle
  bool shortfall = false;  // |M_z| exceeded what both wheels can produce
};

// Largest moment a single motor's positive torque can generate.
inline double max_yaw_moment(double T_max, const VehicleParams& p) {
  if (T_max < 0.0) throw std::invalid_argument("max_yaw_moment: T_max must be >= 0");
  return (p.l_w / 2.0) * (T_max / p.r_w);
}

inline double yaw_moment_from_torques(const TorqueCommand& t, const VehicleParams& p) {
  return p.l_w / (2.0 * p.r_w) * (t.T_rr - t.T_rl);
}

inline TorqueCommand allocate(double M_z, double T_max, const VehicleParams& p) {
  if (T_max < 0.0) throw std::invalid_argument("allocate: T_max must be >= 0");
  const double M_max = max_yaw_moment(T_max, p);
  TorqueCommand t;
  if (M_z == 0.0) return t;

  if (std::abs(M_z) <= M_max) {
    if (M_z >= 0.0) {
      t.T_rr = 2.0 * p.r_w * M_z / p.l_w;
      t.T_rl = 0.0;
      t.branch = 1;
    } else {
      t.T_rr = 0.0;
      t.T_rl = -2.0 * p.r_w * M_z / p.l_w;
      t.branch = 2;
    }
    return t;
  }

  if (std::abs(M_z) > 2.0 * M_max) {
    // Both wheels at their limits; the remainder is unrealizable.
    t.shortfall = true;
    t.branch = (M_z >= 0.0) ? 3 : 4;
    t.T_rr = (M_z >= 0.0) ? T_max : -T_max;
    t.T_rl = -t.T_rr;
    return t;
  }

  if (M_z >= 0.0) {
    t.T_rr = T_max;
    t.T_rl = -2.0 * p.r_w * (M_z - M_max) / p.l_w;
    t.branch = 3;
  } else {
    t.T_rl = T_max;
    t.T_rr = -2.0 * p.r_w * (-M_z - M_max) / p.l_w;
    t.branch = 4;
  }
  return t;
}

}  // namespace slipgap

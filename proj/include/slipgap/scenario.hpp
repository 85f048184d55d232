#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "slipgap/baseline.hpp"
#include "slipgap/config.hpp"
#include "slipgap/mpc.hpp"
#include "slipgap/params.hpp"
#include "slipgap/plant.hpp"

namespace slipgap {

enum class SteerProfileKind { Constant, RampHold, SineDwell, Table };
enum class ControllerKind { None, Mpc, Conventional };

struct SteerProfile {
  SteerProfileKind kind = SteerProfileKind::Constant;
  double amplitude = 0.0;   // road-wheel angle [rad]
  double start_time = 0.0;  // [s]
  double ramp_time = 1.0;   // RampHold: 0 -> amplitude over this span [s]
  double frequency = 0.5;   // SineDwell [Hz]
  double dwell_time = 0.5;  // SineDwell: hold at the second peak [s]
  std::vector<std::pair<double, double>> table;  // (t, delta_f), linearly interpolated

  double at(double t) const {
    switch (kind) {
      case SteerProfileKind::Constant:
        return t >= start_time ? amplitude : 0.0;
      case SteerProfileKind::RampHold: {
        if (t < start_time) return 0.0;
        const double u = (t - start_time) / ramp_time;
        return amplitude * std::min(u, 1.0);
      }
      case SteerProfileKind::SineDwell: {
        // One sine period with a dwell inserted at the second peak
        // (standard sine-with-dwell shape).
        if (t < start_time) return 0.0;
        const double T = 1.0 / frequency;
        double u = t - start_time;
        if (u < 0.75 * T) return amplitude * std::sin(2.0 * M_PI * frequency * u);
        if (u < 0.75 * T + dwell_time) return -amplitude;
        u -= dwell_time;
        if (u < T) return amplitude * std::sin(2.0 * M_PI * frequency * u);
        return 0.0;
      }
      case SteerProfileKind::Table: {
        if (table.empty()) return 0.0;
        if (t <= table.front().first) return table.front().second;
        if (t >= table.back().first) return table.back().second;
        for (std::size_t i = 1; i < table.size(); ++i)
          if (t <= table[i].first) {
            const auto& [t0, d0] = table[i - 1];
            const auto& [t1, d1] = table[i];
            return d0 + (d1 - d0) * (t - t0) / (t1 - t0);
          }
        return table.back().second;
      }
    }
    return 0.0;
  }
};

// Piecewise-linear lateral reference path: (station X [m], offset Y [m]).
struct ReferencePath {
  std::vector<std::pair<double, double>> points;

  double offset_at(double x) const {
    if (points.empty()) return 0.0;
    if (x <= points.front().first) return points.front().second;
    if (x >= points.back().first) return points.back().second;
    for (std::size_t i = 1; i < points.size(); ++i)
      if (x <= points[i].first) {
        const auto& [x0, y0] = points[i - 1];
        const auto& [x1, y1] = points[i];
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
      }
    return points.back().second;
  }

  // ISO-3888-style double lane change: 3.5 m offset, 25 m transitions.
  static ReferencePath double_lane_change(double entry = 15.0, double transition = 25.0,
                                          double offset = 3.5, double hold = 25.0) {
    ReferencePath p;
    double x = entry;
    p.points = {{0.0, 0.0},
                {x, 0.0},
                {x += transition, offset},
                {x += hold, offset},
                {x += transition, 0.0},
                {x + 200.0, 0.0}};
    return p;
  }
};

struct PathFollowerConfig {
  double k_p = 1.2;          // proportional gain on the previewed lateral error
  double preview = 0.6;      // preview time [s]
  double rate_limit = 1.0;   // |delta_f_dot| cap [rad/s]
  double steer_limit = M_PI / 4.0;
};

// Preview-point proportional driver: steer toward the lateral error at a
// point preview*v_x ahead, rate-limited like a human arm.
class PathFollower {
 public:
  PathFollower(PathFollowerConfig cfg, ReferencePath path)
      : cfg_(cfg), path_(std::move(path)) {
    if (!(cfg_.preview > 0.0)) throw std::invalid_argument("PathFollower: preview must be positive");
  }

  DriverInput steer(const PlantState& s, double dt) {
    const double d_p = cfg_.preview * s.v_x;
    const double y_pred = s.Y + d_p * std::sin(s.psi);
    const double err = path_.offset_at(s.X + d_p) - y_pred;
    double target = cfg_.k_p * err / d_p;
    target = std::clamp(target, -cfg_.steer_limit, cfg_.steer_limit);
    const double max_step = cfg_.rate_limit * dt;
    const double delta = std::clamp(target - delta_prev_, -max_step, max_step);
    delta_prev_ += delta;
    DriverInput u;
    u.delta_f = delta_prev_;
    u.delta_f_dot = delta / dt;
    return u;
  }

 private:
  PathFollowerConfig cfg_;
  ReferencePath path_;
  double delta_prev_ = 0.0;
};

struct Scenario {
  std::string name = "scenario";
  double mu = 0.85;
  double v_x = 18.06;  // [m/s]
  SteerProfile steer;
  bool use_path_follower = false;
  PathFollowerConfig follower;
  ReferencePath path;
  ControllerKind controller = ControllerKind::None;
  double duration = 6.0;             // [s]
  double control_enable_time = 0.5;  // [s]
  MpcConfig mpc;
  SlidingConfig sliding;
  double observer_pole_1 = -30.0;
  double observer_pole_2 = -40.0;
  bool observer_hybrid_x1 = true;

  void validate() const {
    if (!(duration > 0.0)) throw std::invalid_argument("Scenario: duration must be positive");
    if (!(mu > 0.0) || mu > 1.2) throw std::invalid_argument("Scenario: need mu in (0, 1.2]");
    if (!(v_x > 0.0)) throw std::invalid_argument("Scenario: v_x must be positive");
  }
};

inline ControllerKind controller_from_string(const std::string& s) {
  if (s == "none") return ControllerKind::None;
  if (s == "mpc") return ControllerKind::Mpc;
  if (s == "conventional") return ControllerKind::Conventional;
  throw std::runtime_error("unknown controller '" + s + "' (none|mpc|conventional)");
}

inline const char* controller_to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::None: return "none";
    case ControllerKind::Mpc: return "mpc";
    case ControllerKind::Conventional: return "conventional";
  }
  return "?";
}

// Assemble vehicle + scenario settings from a flat config. Every key is
// optional; defaults match the built-in parameter set.
inline VehicleParams vehicle_from_config(const Config& c) {
  VehicleParams p;
  p.m = c.get_double("vehicle.m", p.m);
  p.l_f = c.get_double("vehicle.l_f", p.l_f);
  p.l_r = c.get_double("vehicle.l_r", p.l_r);
  p.C_f = c.get_double("vehicle.C_f", p.C_f);
  p.C_r = c.get_double("vehicle.C_r", p.C_r);
  p.I_z = c.get_double("vehicle.I_z", p.m * p.l_f * p.l_r);
  p.r_w = c.get_double("vehicle.r_w", p.r_w);
  p.l_w = c.get_double("vehicle.l_w", p.l_w);
  p.g = c.get_double("vehicle.g", p.g);
  p.T_s = c.get_double("vehicle.T_s", p.T_s);
  p.validate();
  return p;
}

inline MotorTorqueCurve motor_from_config(const Config& c) {
  return MotorTorqueCurve::from_envelope(c.get_double("motor.T_base", 300.0),
                                         c.get_double("motor.P_max", 40000.0));
}

inline Scenario scenario_from_config(const Config& c) {
  Scenario s;
  s.name = c.get_string("scenario.name", s.name);
  s.mu = c.get_double("scenario.mu", s.mu);
  s.v_x = c.get_double("scenario.v_x", s.v_x);
  s.duration = c.get_double("scenario.duration", s.duration);
  s.control_enable_time = c.get_double("scenario.control_enable_time", s.control_enable_time);
  s.controller = controller_from_string(c.get_string("scenario.controller", "none"));

  const std::string kind = c.get_string("steer.profile", "ramp-hold");
  if (kind == "constant") s.steer.kind = SteerProfileKind::Constant;
  else if (kind == "ramp-hold") s.steer.kind = SteerProfileKind::RampHold;
  else if (kind == "sine-dwell") s.steer.kind = SteerProfileKind::SineDwell;
  else if (kind == "table") s.steer.kind = SteerProfileKind::Table;
  else throw std::runtime_error("unknown steer.profile '" + kind + "'");
  s.steer.amplitude = c.get_double("steer.amplitude", s.steer.amplitude);
  s.steer.start_time = c.get_double("steer.start_time", s.steer.start_time);
  s.steer.ramp_time = c.get_double("steer.ramp_time", s.steer.ramp_time);
  s.steer.frequency = c.get_double("steer.frequency", s.steer.frequency);
  s.steer.dwell_time = c.get_double("steer.dwell_time", s.steer.dwell_time);
  for (int i = 0;; ++i) {
    const std::string tk = "steer.table." + std::to_string(i) + ".t";
    const std::string dk = "steer.table." + std::to_string(i) + ".delta";
    if (!c.has(tk) || !c.has(dk)) break;
    s.steer.table.emplace_back(c.get_double(tk, 0.0), c.get_double(dk, 0.0));
  }

  s.use_path_follower = c.get_string("scenario.driver", "steer-profile") == "path-follower";
  if (s.use_path_follower) {
    s.follower.k_p = c.get_double("driver.k_p", s.follower.k_p);
    s.follower.preview = c.get_double("driver.preview", s.follower.preview);
    s.follower.rate_limit = c.get_double("driver.rate_limit", s.follower.rate_limit);
    if (c.get_string("path.shape", "double-lane-change") == "double-lane-change") {
      s.path = ReferencePath::double_lane_change(
          c.get_double("path.entry", 15.0), c.get_double("path.transition", 25.0),
          c.get_double("path.offset", 3.5), c.get_double("path.hold", 25.0));
    }
  }

  s.mpc.N = c.get_int("mpc.N", s.mpc.N);
  s.mpc.Q11 = c.get_double("mpc.Q11", s.mpc.Q11);
  s.mpc.Q22 = c.get_double("mpc.Q22", s.mpc.Q22);
  s.mpc.R = c.get_double("mpc.R", s.mpc.R);
  s.mpc.W = c.get_double("mpc.W", s.mpc.W);
  s.mpc.zeta = c.get_double("mpc.zeta", s.mpc.zeta);
  s.mpc.alpha_r_des = c.get_double("mpc.alpha_r_des", s.mpc.alpha_r_des);
  s.mpc.zeta_min = c.get_double("mpc.zeta_min", s.mpc.zeta_min);
  s.mpc.zeta_max = c.get_double("mpc.zeta_max", s.mpc.zeta_max);
  s.mpc.alpha_r_max = c.get_double("mpc.alpha_r_max", s.mpc.alpha_r_max);
  s.mpc.slack_penalty = c.get_double("mpc.slack_penalty", s.mpc.slack_penalty);
  s.mpc.two_wheel_bound = c.get_bool("mpc.two_wheel_bound", s.mpc.two_wheel_bound);

  s.sliding.lambda = c.get_double("sliding.lambda", s.sliding.lambda);
  s.sliding.zeta = c.get_double("sliding.zeta", s.mpc.zeta);  // shared set value by default

  s.observer_pole_1 = c.get_double("observer.pole_1", s.observer_pole_1);
  s.observer_pole_2 = c.get_double("observer.pole_2", s.observer_pole_2);
  s.observer_hybrid_x1 = c.get_bool("observer.hybrid_x1", s.observer_hybrid_x1);

  s.validate();
  s.mpc.validate();
  s.sliding.validate();
  return s;
}

}  // namespace slipgap

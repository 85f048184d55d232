#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "slipgap/allocation.hpp"
#include "slipgap/baseline.hpp"
#include "slipgap/ctrl_model.hpp"
#include "slipgap/mpc.hpp"
#include "slipgap/observer.hpp"
#include "slipgap/params.hpp"
#include "slipgap/plant.hpp"
#include "slipgap/scenario.hpp"

// Closed-loop experiment rig: plant -> sensors -> observer -> controller ->
// allocation -> plant, at the control rate with plant sub-stepping, plus
// telemetry, run metrics, and CSV output.

namespace slipgap {

// Flag bits in TelemetryRecord::flags.
enum : unsigned {
  kFlagControllerFault = 1u,
  kFlagObserverFault = 2u,
  kFlagInputClamped = 4u,
  kFlagAllocationShortfall = 8u,
};

struct TelemetryRecord {
  double t = 0.0;
  double delta_f = 0.0;
  double v_x = 0.0;
  double beta = 0.0;
  double r = 0.0;
  double a_y = 0.0;
  double alpha_f = 0.0;
  double alpha_r = 0.0;
  double x1 = 0.0;
  double x2_hat = 0.0;
  double M_z = 0.0;
  double T_rl = 0.0;
  double T_rr = 0.0;
  double slack = 0.0;
  int solver_iters = 0;
  unsigned flags = 0;
};

struct RunSummary {
  double max_abs_ay_g = 0.0;  // over the post-enable window, in units of g
  double improvement_pct = std::numeric_limits<double>::quiet_NaN();  // set by paired runs
  int constraint_violations = 0;  // records with positive reported slack
  double peak_abs_x1 = 0.0;
  double peak_abs_x2 = 0.0;
  int saturation_oscillation_events = 0;
  bool unstable = false;
  std::size_t records = 0;
};

struct RunResult {
  std::vector<TelemetryRecord> telemetry;
  RunSummary summary;
};

inline RunResult run_scenario(const Scenario& sc, const VehicleParams& p,
                              const MotorTorqueCurve& motor) {
  sc.validate();
  p.validate();

  const TireCurve front = TireCurve::front(p, sc.mu);
  const TireCurve rear = TireCurve::rear(p, sc.mu);

  PlantState state;
  state.v_x = sc.v_x;

  std::optional<PathFollower> follower;
  if (sc.use_path_follower) follower.emplace(sc.follower, sc.path);

  SteerRateFilter steer_rate;
  MpcController mpc(sc.mpc);
  ObserverState obs;
  obs.hybrid_x1 = sc.observer_hybrid_x1;
  {
    const CtrlModel m0 = build_model(p, sc.v_x, 0.0, 0.0);
    obs.l_gain = design_observer_gain(m0, sc.observer_pole_1, sc.observer_pole_2);
  }

  const int n_steps = static_cast<int>(std::llround(sc.duration / p.T_s));
  const int n_sub = std::max(1, static_cast<int>(std::llround(p.T_s / 0.001)));
  const double dt_sub = p.T_s / n_sub;

  RunResult out;
  out.telemetry.reserve(static_cast<std::size_t>(n_steps));

  double u_applied = 0.0;  // yaw moment realized by the allocator last period
  double last_rail_time = -1.0;
  double last_rail_sign = 0.0;

  for (int k = 0; k < n_steps; ++k) {
    const double t = k * p.T_s;

    DriverInput drv;
    if (follower) {
      drv = follower->steer(state, p.T_s);
    } else {
      drv.delta_f = sc.steer.at(t);
    }
    const double delta_dot = steer_rate.update(drv.delta_f, p.T_s);
    drv.delta_f_dot = delta_dot;

    // Production-vehicle sensor set: yaw rate, lateral acceleration, speed.
    const double a_y = lateral_acceleration(state, drv, front, rear, p);
    const Vec2 y_meas = {{state.r, a_y}};
    const double x1_meas = measure_x1(state.r, drv.delta_f, state.v_x, p);

    const CtrlModel model = build_model(p, state.v_x, drv.delta_f, delta_dot);
    observer_update(obs, model, u_applied, y_meas, p.T_s, x1_meas);

    const double T_max = max_motor_torque(motor, state.v_x, p.r_w);
    const double M_single = max_yaw_moment(T_max, p);
    const double u_bound = (sc.mpc.two_wheel_bound ? 2.0 : 1.0) * M_single;

    TelemetryRecord rec;
    rec.t = t;
    rec.delta_f = drv.delta_f;
    rec.v_x = state.v_x;
    rec.beta = state.beta;
    rec.r = state.r;
    rec.a_y = a_y;
    const auto [alpha_f, alpha_r] = wheel_sideslips(state, drv, p);
    rec.alpha_f = alpha_f;
    rec.alpha_r = alpha_r;
    rec.x1 = x1_meas;
    rec.x2_hat = obs.x_hat[1];
    if (obs.fault) rec.flags |= kFlagObserverFault;

    double M_z = 0.0;
    const bool control_on = sc.controller != ControllerKind::None && t >= sc.control_enable_time;
    // Both laws target |x1| = zeta from above; while the gap is inside the
    // target they stay passive so straight driving is never actuated.
    const double target_gap =
        (sc.controller == ControllerKind::Mpc) ? sc.mpc.zeta : sc.sliding.zeta;
    const bool engaged = control_on && std::abs(x1_meas) > target_gap;
    if (control_on && !engaged && sc.controller == ControllerKind::Mpc) mpc.reset();
    if (engaged) {
      if (sc.controller == ControllerKind::Mpc) {
        const MpcStepResult r = mpc.step(x1_meas, obs.x_hat[1], model, -u_bound, u_bound);
        M_z = r.M_z;
        rec.slack = r.slack;
        rec.solver_iters = r.iterations;
        if (r.fault) rec.flags |= kFlagControllerFault;
      } else {
        const double alpha_f_est = obs.x_hat[0] + obs.x_hat[1];
        const SlidingStepResult r = sliding_control(x1_meas, delta_dot, alpha_f_est, obs.x_hat[1],
                                                    p, state.v_x, sc.sliding, -u_bound, u_bound);
        M_z = r.M_z;
        if (r.clamped) rec.flags |= kFlagInputClamped;
      }
    }

    const TorqueCommand torques = allocate(M_z, T_max, p);
    if (torques.shortfall) rec.flags |= kFlagAllocationShortfall;
    u_applied = yaw_moment_from_torques(torques, p);
    rec.M_z = u_applied;
    rec.T_rl = torques.T_rl;
    rec.T_rr = torques.T_rr;

    // Rail-to-rail flips of the applied moment within a short window are the
    // saturation-oscillation signature of the unconstrained baseline.
    if (control_on && u_bound > 0.0 && std::abs(u_applied) >= 0.999 * u_bound) {
      const double s = (u_applied > 0.0) ? 1.0 : -1.0;
      if (last_rail_sign != 0.0 && s != last_rail_sign && t - last_rail_time < 0.5)
        ++out.summary.saturation_oscillation_events;
      last_rail_sign = s;
      last_rail_time = t;
    }

    out.telemetry.push_back(rec);

    // Metrics are taken over the post-enable window for every controller so
    // paired runs compare like for like.
    if (t >= sc.control_enable_time)
      out.summary.max_abs_ay_g = std::max(out.summary.max_abs_ay_g, std::abs(a_y) / p.g);
    out.summary.peak_abs_x1 = std::max(out.summary.peak_abs_x1, std::abs(alpha_f - alpha_r));
    out.summary.peak_abs_x2 = std::max(out.summary.peak_abs_x2, std::abs(alpha_r));
    if (rec.slack > 0.0) ++out.summary.constraint_violations;

    try {
      for (int i = 0; i < n_sub; ++i)
        state = plant_step(state, drv, u_applied, dt_sub, front, rear, p);
    } catch (const simulation_fault&) {
      out.summary.unstable = true;
      break;
    }
  }

  out.summary.records = out.telemetry.size();
  return out;
}

// CSV output: fixed column order matching TelemetryRecord, 9 significant
// digits, bit-stable across repeated runs.
inline void write_csv(std::ostream& os, const std::vector<TelemetryRecord>& records) {
  os << "t,delta_f,v_x,beta,r,a_y,alpha_f,alpha_r,x1,x2_hat,M_z,T_rl,T_rr,slack,solver_iters,flags\n";
  char buf[512];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf),
                  "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%d,%u\n",
                  r.t, r.delta_f, r.v_x, r.beta, r.r, r.a_y, r.alpha_f, r.alpha_r, r.x1, r.x2_hat,
                  r.M_z, r.T_rl, r.T_rr, r.slack, r.solver_iters, r.flags);
    os << buf;
  }
}

inline void write_summary(std::ostream& os, const RunSummary& s) {
  char buf[128];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
  };
  os << "max_abs_ay_g = " << num(s.max_abs_ay_g) << "\n";
  if (std::isfinite(s.improvement_pct)) os << "improvement_pct = " << num(s.improvement_pct) << "\n";
  os << "constraint_violations = " << s.constraint_violations << "\n";
  os << "peak_abs_x1 = " << num(s.peak_abs_x1) << "\n";
  os << "peak_abs_x2 = " << num(s.peak_abs_x2) << "\n";
  os << "saturation_oscillation_events = " << s.saturation_oscillation_events << "\n";
  os << "unstable = " << (s.unstable ? "true" : "false") << "\n";
  os << "records = " << s.records << "\n";
}

struct ComparisonReport {
  RunResult uncontrolled;
  RunResult mpc;
  RunResult conventional;
};

// Paired runs with identical scenario settings: uncontrolled, predictive,
// and conventional. Improvement is defined against the uncontrolled run.
inline ComparisonReport compare_controllers(const Scenario& sc, const VehicleParams& p,
                                            const MotorTorqueCurve& motor) {
  ComparisonReport rep;
  Scenario s = sc;

  s.controller = ControllerKind::None;
  rep.uncontrolled = run_scenario(s, p, motor);

  s.controller = ControllerKind::Mpc;
  rep.mpc = run_scenario(s, p, motor);

  s.controller = ControllerKind::Conventional;
  rep.conventional = run_scenario(s, p, motor);

  const double base = rep.uncontrolled.summary.max_abs_ay_g;
  if (base > 0.0) {
    rep.mpc.summary.improvement_pct = 100.0 * (rep.mpc.summary.max_abs_ay_g - base) / base;
    rep.conventional.summary.improvement_pct =
        100.0 * (rep.conventional.summary.max_abs_ay_g - base) / base;
  }
  return rep;
}

// Paired uncontrolled-vs-MPC runs only (the cornering-improvement metric).
inline double mpc_improvement_pct(const Scenario& sc, const VehicleParams& p,
                                  const MotorTorqueCurve& motor) {
  Scenario s = sc;
  s.controller = ControllerKind::None;
  const RunResult base = run_scenario(s, p, motor);
  s.controller = ControllerKind::Mpc;
  const RunResult ctrl = run_scenario(s, p, motor);
  if (!(base.summary.max_abs_ay_g > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return 100.0 * (ctrl.summary.max_abs_ay_g - base.summary.max_abs_ay_g) /
         base.summary.max_abs_ay_g;
}

}  // namespace slipgap

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "slipgap/ctrl_model.hpp"
#include "slipgap/linalg.hpp"
#include "slipgap/qp.hpp"

// Finite-horizon constrained controller on the sideslip-difference model,
// condensed into a dense box-constrained QP over the input sequence. State
// bounds are softened with a quadratic penalty so the problem is always
// feasible; the input bounds stay hard.

namespace slipgap {

struct MpcConfig {
  int N = 5;             // prediction horizon [steps]
  double Q11 = 1000.0;   // weight on x1 tracking (dominant by design)
  double Q22 = 1.0;      // weight on x2
  double R = 1e-10;      // input weight (the input-to-state gain is ~1e-6 per step)
  double W = 1e-10;      // input-rate weight
  double zeta = 0.5 * M_PI / 180.0;         // target |x1| gap [rad]
  double alpha_r_des = 0.5 * M_PI / 180.0;  // target |x2| [rad]
  double zeta_min = 0.0;                    // |x1| lower bound [rad]
  double zeta_max = 1.5 * M_PI / 180.0;     // |x1| upper bound [rad]
  double alpha_r_max = 2.0 * M_PI / 180.0;  // symmetric x2 bound [rad]
  double slack_penalty = 1e4;
  bool two_wheel_bound = true;  // input bound +-2*Mz_max (both wheels) vs single-wheel

  void validate() const {
    if (N < 1) throw std::invalid_argument("MpcConfig: N must be >= 1");
    if (Q11 < 0.0 || Q22 < 0.0 || R < 0.0 || W < 0.0)
      throw std::invalid_argument("MpcConfig: weights must be non-negative");
    if (!(R + W > 0.0)) throw std::invalid_argument("MpcConfig: need R + W > 0");
    if (!(zeta_min < zeta_max)) throw std::invalid_argument("MpcConfig: zeta bounds inverted");
    if (!(alpha_r_max > 0.0)) throw std::invalid_argument("MpcConfig: alpha_r_max must be positive");
    if (slack_penalty < 0.0) throw std::invalid_argument("MpcConfig: slack_penalty must be >= 0");
  }
};

// Condensed problem: hard input box plus softened linear state rows
// G*U <= h penalized quadratically.
struct QpProblem {
  BoxQp qp;
  std::vector<std::vector<double>> G;
  std::vector<double> h;
  double slack_penalty = 0.0;
  // Affine prediction map, kept for telemetry: x(k+1) = pred_M[k]*U + pred_c[k].
  std::vector<std::array<std::vector<double>, 2>> pred_M;
  std::vector<Vec2> pred_c;
};

// Stack the dynamics over the horizon and expand the tracking cost into
// 0.5 U'HU + f'U. xr is the state reference, [xlo, xhi] the (soft) state box.
inline QpProblem condense(const CtrlModel& m, const MpcConfig& cfg, const Vec2& x0, double u_prev,
                          double u_min, double u_max, const Vec2& xr, const Vec2& xlo,
                          const Vec2& xhi) {
  cfg.validate();
  if (!x0.finite() || !std::isfinite(u_prev)) throw std::invalid_argument("condense: non-finite inputs");
  const int N = cfg.N;

  QpProblem p;
  p.slack_penalty = cfg.slack_penalty;
  p.qp.H.assign(N, std::vector<double>(N, 0.0));
  p.qp.f.assign(N, 0.0);
  p.qp.lb.assign(N, u_min);
  p.qp.ub.assign(N, u_max);

  // Running affine map x(k) = M U + c, rows of M held per state.
  std::array<std::vector<double>, 2> M = {std::vector<double>(N, 0.0),
                                          std::vector<double>(N, 0.0)};
  Vec2 c = x0;
  const double q[2] = {cfg.Q11, cfg.Q22};

  for (int k = 0; k < N; ++k) {
    // Propagate: x(k+1) = A_d x(k) + B_d u(k) + E_d.
    std::array<std::vector<double>, 2> Mn = {std::vector<double>(N, 0.0),
                                             std::vector<double>(N, 0.0)};
    for (int j = 0; j < N; ++j) {
      Mn[0][j] = m.A_d(0, 0) * M[0][j] + m.A_d(0, 1) * M[1][j];
      Mn[1][j] = m.A_d(1, 0) * M[0][j] + m.A_d(1, 1) * M[1][j];
    }
    Mn[0][k] += m.B_d[0];
    Mn[1][k] += m.B_d[1];
    const Vec2 cn = m.A_d * c + m.E_d;
    M = Mn;
    c = cn;

    // Tracking term (x(k+1) - xr)' Q (x(k+1) - xr).
    for (int s = 0; s < 2; ++s) {
      if (q[s] == 0.0) continue;
      for (int i = 0; i <= k; ++i) {
        p.qp.f[i] += 2.0 * q[s] * M[s][i] * (c[s] - xr[s]);
        for (int j = 0; j <= k; ++j) p.qp.H[i][j] += 2.0 * q[s] * M[s][i] * M[s][j];
      }
    }

    // Soft state box rows for x(k+1).
    for (int s = 0; s < 2; ++s) {
      std::vector<double> row(N, 0.0);
      for (int j = 0; j <= k; ++j) row[j] = M[s][j];
      p.G.push_back(row);
      p.h.push_back(xhi[s] - c[s]);
      for (double& v : row) v = -v;
      p.G.push_back(row);
      p.h.push_back(c[s] - xlo[s]);
    }

    p.pred_M.push_back(M);
    p.pred_c.push_back(c);
  }

  // Input magnitude and rate penalties.
  for (int k = 0; k < N; ++k) p.qp.H[k][k] += 2.0 * cfg.R;
  p.qp.H[0][0] += 2.0 * cfg.W;
  p.qp.f[0] += -2.0 * cfg.W * u_prev;
  for (int k = 1; k < N; ++k) {
    p.qp.H[k][k] += 2.0 * cfg.W;
    p.qp.H[k - 1][k - 1] += 2.0 * cfg.W;
    p.qp.H[k][k - 1] -= 2.0 * cfg.W;
    p.qp.H[k - 1][k] -= 2.0 * cfg.W;
  }

  return p;
}

struct MpcSolution {
  std::vector<double> sequence;
  double slack = 0.0;  // worst soft-constraint violation at the solution [rad]
  int iterations = 0;
  bool degraded = false;
};

// Solve the condensed problem. The soft rows make the objective piecewise
// quadratic; iterate on the set of violated rows, each pass solving the box
// QP with the active penalty terms folded into H and f.
inline MpcSolution solve_qp(const QpProblem& p, const std::vector<double>* warm_start = nullptr) {
  const std::size_t n = p.qp.size();
  const std::size_t nrows = p.G.size();
  MpcSolution sol;

  std::vector<char> active(nrows, 0);
  std::vector<double> u;
  if (warm_start && warm_start->size() == n) u = *warm_start;

  auto violation = [&](std::size_t r, const std::vector<double>& x) {
    double gx = 0.0;
    for (std::size_t j = 0; j < n; ++j) gx += p.G[r][j] * x[j];
    return gx - p.h[r];
  };

  const int max_outer = 30;
  for (int outer = 0; outer < max_outer; ++outer) {
    BoxQp aug = p.qp;
    if (p.slack_penalty > 0.0) {
      for (std::size_t r = 0; r < nrows; ++r) {
        if (!active[r]) continue;
        for (std::size_t i = 0; i < n; ++i) {
          aug.f[i] += -2.0 * p.slack_penalty * p.h[r] * p.G[r][i];
          for (std::size_t j = 0; j < n; ++j)
            aug.H[i][j] += 2.0 * p.slack_penalty * p.G[r][i] * p.G[r][j];
        }
      }
    }
    QpResult res = solve_box_qp(aug, u.empty() ? nullptr : &u);
    sol.iterations += res.iterations + 1;
    sol.degraded = sol.degraded || res.degraded;
    u = res.u;

    if (p.slack_penalty <= 0.0) break;
    bool changed = false;
    for (std::size_t r = 0; r < nrows; ++r) {
      const char want = violation(r, u) > 1e-12 ? 1 : 0;
      if (want != active[r]) {
        active[r] = want;
        changed = true;
      }
    }
    if (!changed) break;
  }

  sol.sequence = u;
  for (std::size_t r = 0; r < nrows; ++r)
    sol.slack = std::max(sol.slack, violation(r, sol.sequence));
  sol.slack = std::max(sol.slack, 0.0);
  return sol;
}

struct MpcStepResult {
  double M_z = 0.0;
  std::vector<double> sequence;
  double slack = 0.0;
  int iterations = 0;
  bool fault = false;
  double pred_x1_min = 0.0, pred_x1_max = 0.0;
  double pred_x2_min = 0.0, pred_x2_max = 0.0;
};

// Receding-horizon controller state: previous applied input and the shifted
// warm start for the next solve.
class MpcController {
 public:
  explicit MpcController(MpcConfig cfg) : cfg_(cfg) { cfg_.validate(); }

  const MpcConfig& config() const { return cfg_; }
  double previous_input() const { return u_prev_; }
  void reset() {
    u_prev_ = 0.0;
    warm_.clear();
  }

  // One control period: sign-adapt the reference and state box to the turn
  // direction, solve, apply the first input (clamped as a final guard).
  MpcStepResult step(double x1_meas, double x2_hat, const CtrlModel& m, double u_min,
                     double u_max) {
    MpcStepResult out;
    if (!std::isfinite(x1_meas) || !std::isfinite(x2_hat) || !m.finite() || !(u_min <= u_max)) {
      out.fault = true;
      u_prev_ = 0.0;
      warm_.clear();
      return out;
    }

    const double sgn = (x1_meas >= 0.0) ? 1.0 : -1.0;
    const Vec2 xr = {{sgn * cfg_.zeta, sgn * cfg_.alpha_r_des}};
    const Vec2 x0 = {{x1_meas, x2_hat}};
    Vec2 xlo, xhi;
    if (sgn > 0.0) {
      xlo[0] = cfg_.zeta_min;
      xhi[0] = cfg_.zeta_max;
    } else {
      xlo[0] = -cfg_.zeta_max;
      xhi[0] = -cfg_.zeta_min;
    }
    xlo[1] = -cfg_.alpha_r_max;
    xhi[1] = cfg_.alpha_r_max;

    MpcSolution sol;
    try {
      const QpProblem p = condense(m, cfg_, x0, u_prev_, u_min, u_max, xr, xlo, xhi);
      sol = solve_qp(p, warm_.empty() ? nullptr : &warm_);
      for (int k = 0; k < cfg_.N; ++k) {
        const double x1k = [&] {
          double v = p.pred_c[k][0];
          for (int j = 0; j < cfg_.N; ++j) v += p.pred_M[k][0][j] * sol.sequence[j];
          return v;
        }();
        const double x2k = [&] {
          double v = p.pred_c[k][1];
          for (int j = 0; j < cfg_.N; ++j) v += p.pred_M[k][1][j] * sol.sequence[j];
          return v;
        }();
        if (k == 0) {
          out.pred_x1_min = out.pred_x1_max = x1k;
          out.pred_x2_min = out.pred_x2_max = x2k;
        } else {
          out.pred_x1_min = std::min(out.pred_x1_min, x1k);
          out.pred_x1_max = std::max(out.pred_x1_max, x1k);
          out.pred_x2_min = std::min(out.pred_x2_min, x2k);
          out.pred_x2_max = std::max(out.pred_x2_max, x2k);
        }
      }
    } catch (const std::exception&) {
      out.fault = true;
      u_prev_ = 0.0;
      warm_.clear();
      return out;
    }

    out.sequence = sol.sequence;
    out.slack = sol.slack;
    out.iterations = sol.iterations;
    out.fault = sol.degraded;
    out.M_z = std::clamp(sol.sequence.front(), u_min, u_max);

    // Warm start for the next period: shift by one step.
    warm_ = sol.sequence;
    warm_.erase(warm_.begin());
    warm_.push_back(warm_.empty() ? 0.0 : warm_.back());
    u_prev_ = out.M_z;
    return out;
  }

 private:
  MpcConfig cfg_;
  double u_prev_ = 0.0;
  std::vector<double> warm_;
};

}  // namespace slipgap

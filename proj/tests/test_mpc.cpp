#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "slipgap/ctrl_model.hpp"
#include "slipgap/mpc.hpp"

using namespace slipgap;

namespace {

const VehicleParams kParams;
const double kTs = 0.005;

CtrlModel nominal_model(double delta = 0.0, double ddelta = 0.0) {
  return build_model(kParams, 18.06, delta, ddelta, kTs);
}

// Reference cost of an input sequence, evaluated by direct simulation of the
// discrete model -- independent of the condensed H/f assembly.
double rollout_cost(const CtrlModel& m, const MpcConfig& cfg, const Vec2& x0, double u_prev,
                    const Vec2& xr, const std::vector<double>& U) {
  double J = 0.0;
  Vec2 x = x0;
  double prev = u_prev;
  for (int k = 0; k < cfg.N; ++k) {
    x = m.A_d * x + m.B_d * U[k] + m.E_d;
    const Vec2 e = x - xr;
    J += cfg.Q11 * e[0] * e[0] + cfg.Q22 * e[1] * e[1];
    J += cfg.R * U[k] * U[k];
    J += cfg.W * (U[k] - prev) * (U[k] - prev);
    prev = U[k];
  }
  return J;
}

const Vec2 kWideLo = {{-10.0, -10.0}};
const Vec2 kWideHi = {{10.0, 10.0}};

}  // namespace

TEST_CASE("condensed Hessian for the trivial horizon") {
  // N = 1, Q = 0, W = 0, R = 1: the QP is min u^2, so H = 2 and f = 0.
  MpcConfig cfg;
  cfg.N = 1;
  cfg.Q11 = 0.0;
  cfg.Q22 = 0.0;
  cfg.W = 0.0;
  cfg.R = 1.0;
  const CtrlModel m = nominal_model();
  const QpProblem p = condense(m, cfg, Vec2{{0.01, -0.002}}, 0.0, -1000.0, 1000.0,
                               Vec2{{0.0, 0.0}}, kWideLo, kWideHi);
  REQUIRE(p.qp.H.size() == 1);
  CHECK(p.qp.H[0][0] == Catch::Approx(2.0).margin(1e-12));
  CHECK(p.qp.f[0] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("condensed cost matches direct rollout") {
  // Oracle: J(U) - J(0) from simulation must equal the change in
  // 1/2 U'HU + f'U, because both differ from the true cost by the same
  // U-independent constant.
  MpcConfig cfg;
  cfg.N = 5;
  const CtrlModel m = nominal_model(0.02, 0.1);
  const Vec2 x0 = {{-0.012, -0.004}};
  const Vec2 xr = {{-cfg.zeta, -cfg.alpha_r_des}};
  const double u_prev = 37.0;
  const QpProblem p = condense(m, cfg, x0, u_prev, -1334.0, 1334.0, xr, kWideLo, kWideHi);

  const std::vector<double> zero(cfg.N, 0.0);
  const double J0 = rollout_cost(m, cfg, x0, u_prev, xr, zero);

  std::mt19937 rng(31);
  std::uniform_real_distribution<double> d(-500.0, 500.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> U(cfg.N);
    for (auto& u : U) u = d(rng);
    const double direct = rollout_cost(m, cfg, x0, u_prev, xr, U) - J0;
    double quad = 0.0, lin = 0.0;
    for (int i = 0; i < cfg.N; ++i) {
      lin += p.qp.f[i] * U[i];
      for (int j = 0; j < cfg.N; ++j) quad += U[i] * p.qp.H[i][j] * U[j];
    }
    const double condensed = 0.5 * quad + lin;
    CHECK(condensed == Catch::Approx(direct).margin(1e-7 * (1.0 + std::abs(direct))));
  }
}

TEST_CASE("Hessian is symmetric positive definite") {
  MpcConfig cfg;
  const CtrlModel m = nominal_model(0.01, 0.0);
  const QpProblem p = condense(m, cfg, Vec2{{0.0, 0.0}}, 0.0, -1334.0, 1334.0,
                               Vec2{{0.0, 0.0}}, kWideLo, kWideHi);
  const int n = cfg.N;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      CHECK(p.qp.H[i][j] == Catch::Approx(p.qp.H[j][i]).margin(1e-10));
  // Cholesky by hand: all pivots strictly positive.
  std::vector<std::vector<double>> Lm(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = p.qp.H[i][j];
      for (int k = 0; k < j; ++k) s -= Lm[i][k] * Lm[j][k];
      if (i == j) {
        REQUIRE(s > 0.0);
        Lm[i][i] = std::sqrt(s);
      } else {
        Lm[i][j] = s / Lm[j][j];
      }
    }
  }
}

TEST_CASE("zero state, zero reference, zero driver gives zero control") {
  MpcConfig cfg;
  const CtrlModel m = nominal_model();  // zero steer: E_d = 0
  const QpProblem p = condense(m, cfg, Vec2{{0.0, 0.0}}, 0.0, -1334.0, 1334.0,
                               Vec2{{0.0, 0.0}}, kWideLo, kWideHi);
  const MpcSolution sol = solve_qp(p);
  for (double u : sol.sequence) CHECK(std::abs(u) < 1e-9);
  CHECK(sol.slack == 0.0);
}

TEST_CASE("understeer excess commands a restoring moment") {
  // Left turn, x1 beyond -zeta: the controller must push M_z > 0.
  MpcConfig cfg;
  const CtrlModel m = nominal_model(0.03, 0.0);
  MpcController ctl(cfg);
  const MpcStepResult r = ctl.step(-2.0 * cfg.zeta, -0.005, m, -1334.0, 1334.0);
  CHECK(!r.fault);
  CHECK(r.M_z > 0.0);

  // Mirror: right turn, positive excess -> negative moment (E terms flip with
  // the steer sign to keep the problem symmetric).
  const CtrlModel m2 = nominal_model(-0.03, 0.0);
  MpcController ctl2(cfg);
  const MpcStepResult r2 = ctl2.step(2.0 * cfg.zeta, 0.005, m2, -1334.0, 1334.0);
  CHECK(r2.M_z < 0.0);
  CHECK(r2.M_z == Catch::Approx(-r.M_z).epsilon(1e-9));
}

TEST_CASE("first input respects the hard bounds") {
  MpcConfig cfg;
  cfg.Q11 = 1e7;  // make it want a huge correction
  const CtrlModel m = nominal_model(0.06, 0.0);
  MpcController ctl(cfg);
  const MpcStepResult r = ctl.step(-0.2, -0.05, m, -500.0, 500.0);
  CHECK(std::abs(r.M_z) <= 500.0 + 1e-12);
  CHECK(std::abs(r.M_z) == Catch::Approx(500.0).margin(1e-9));
}

TEST_CASE("soft state bound activates and tightens with penalty") {
  MpcConfig cfg;
  const CtrlModel m = nominal_model(0.04, 0.0);
  const Vec2 x0 = {{-0.03, -0.004}};
  const Vec2 xr = {{-cfg.zeta, -cfg.alpha_r_des}};
  // Tight rear-slip box that the free trajectory must violate.
  const Vec2 xlo = {{-10.0, -0.002}};
  const Vec2 xhi = {{10.0, 0.002}};

  auto solve_with = [&](double rho) {
    MpcConfig c = cfg;
    c.slack_penalty = rho;
    const QpProblem p = condense(m, c, x0, 0.0, -1334.0, 1334.0, xr, xlo, xhi);
    return solve_qp(p);
  };

  const MpcSolution lo = solve_with(1e2);
  const MpcSolution hi = solve_with(1e7);
  CHECK(lo.slack > 0.0);
  CHECK(hi.slack <= lo.slack + 1e-12);
}

TEST_CASE("repeated solve of the same problem is bit-identical") {
  MpcConfig cfg;
  const CtrlModel m = nominal_model(0.02, 0.05);
  MpcController a(cfg), b(cfg);
  const MpcStepResult ra = a.step(-0.015, -0.003, m, -1334.0, 1334.0);
  const MpcStepResult rb = b.step(-0.015, -0.003, m, -1334.0, 1334.0);
  CHECK(ra.M_z == rb.M_z);
  REQUIRE(ra.sequence.size() == rb.sequence.size());
  for (size_t i = 0; i < ra.sequence.size(); ++i) CHECK(ra.sequence[i] == rb.sequence[i]);
}

TEST_CASE("non-finite measurement yields a zero-moment fault") {
  MpcConfig cfg;
  const CtrlModel m = nominal_model(0.02, 0.0);
  MpcController ctl(cfg);
  const MpcStepResult r = ctl.step(std::nan(""), 0.0, m, -1334.0, 1334.0);
  CHECK(r.fault);
  CHECK(r.M_z == 0.0);
}

TEST_CASE("config validation") {
  MpcConfig cfg;
  cfg.N = 0;
  CHECK_THROWS(cfg.validate());
  cfg = MpcConfig{};
  cfg.Q11 = -1.0;
  CHECK_THROWS(cfg.validate());
  cfg = MpcConfig{};
  cfg.zeta_min = 0.01;
  cfg.zeta_max = 0.001;
  CHECK_THROWS(cfg.validate());
}

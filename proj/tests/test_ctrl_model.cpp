#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "slipgap/ctrl_model.hpp"
#include "test_util.hpp"

using namespace slipgap;

namespace {
const VehicleParams kParams;
}

TEST_CASE("continuous model entries at v_x = 18.06") {
  const double v = 18.06;
  const double delta = 0.02;
  const double ddelta = 0.3;
  const CtrlModel m = build_continuous(kParams, v, delta, ddelta);

  const double m_ = 1140.0, lf = 1.165, lr = 1.165, L = lf + lr;
  const double Cf = 150000.0, Cr = 170000.0, Iz = m_ * lf * lr;

  CHECK(m.A_c.m[0][0] == Catch::Approx(-lf * Cf * L / (Iz * v)).epsilon(1e-14));
  CHECK(m.A_c.m[0][1] == Catch::Approx(L / (Iz * v) * (-lf * Cf + lr * Cr)).epsilon(1e-14));
  CHECK(m.A_c.m[1][0] ==
        Catch::Approx(-Cf / (m_ * v) + lf * lr * Cf / (Iz * v) - v / L).epsilon(1e-14));
  CHECK(m.A_c.m[1][1] == Catch::Approx(-(Cf + Cr) / (m_ * v) + lf * lr * Cf / (Iz * v) -
                                       lr * lr * Cr / (Iz * v))
                             .epsilon(1e-14));
  CHECK(m.B_c[0] == Catch::Approx(L / (Iz * v)).epsilon(1e-14));
  CHECK(m.B_c[1] == Catch::Approx(-lr / (Iz * v)).epsilon(1e-14));
  CHECK(m.E_c[0] == Catch::Approx(-ddelta).epsilon(1e-14));
  CHECK(m.E_c[1] == Catch::Approx(-v / L * delta).epsilon(1e-14));
  CHECK(m.C_c.m[0][0] == Catch::Approx(v / L).epsilon(1e-14));
  CHECK(m.C_c.m[0][1] == 0.0);
  CHECK(m.C_c.m[1][0] == Catch::Approx(-Cf / m_).epsilon(1e-14));
  CHECK(m.C_c.m[1][1] == Catch::Approx(-(Cf + Cr) / m_).epsilon(1e-14));
  CHECK(m.D_c[0] == Catch::Approx(v / L * delta).epsilon(1e-14));
  CHECK(m.D_c[1] == 0.0);
}

TEST_CASE("zero driver input kills the affine terms") {
  const CtrlModel m = build_continuous(kParams, 18.06, 0.0, 0.0);
  CHECK(m.E_c[0] == 0.0);
  CHECK(m.E_c[1] == 0.0);
  CHECK(m.D_c[0] == 0.0);
  CHECK(m.D_c[1] == 0.0);
}

TEST_CASE("independent re-derivation via per-axle coordinates") {
  // Oracle: build the dynamics in (alpha_f, alpha_r) coordinates from the
  // axle force balances, then change basis with S = [[1,-1],[0,1]].
  for (double v : {8.0, 12.5, 18.06, 25.0, 33.0, 40.0}) {
    const testutil::DerivedModel d = testutil::rederive_model(kParams, v, 0.017, 0.11);
    const CtrlModel m = build_continuous(kParams, v, 0.017, 0.11);
    CHECK((m.A_c - d.A).frobenius_norm() < 1e-12 * d.A.frobenius_norm());
    CHECK(std::abs(m.B_c[0] - d.B[0]) < 1e-15);
    CHECK(std::abs(m.B_c[1] - d.B[1]) < 1e-15);
    CHECK(std::abs(m.E_c[0] - d.E[0]) < 1e-12);
    CHECK(std::abs(m.E_c[1] - d.E[1]) < 1e-12);
    CHECK((m.C_c - d.C).frobenius_norm() < 1e-12 * d.C.frobenius_norm());
    CHECK(std::abs(m.D_c[0] - d.D[0]) < 1e-12);
    CHECK(std::abs(m.D_c[1] - d.D[1]) < 1e-12);
  }
}

TEST_CASE("Euler discretization") {
  const double Ts = 0.005;
  const CtrlModel m = build_model(kParams, 18.06, 0.02, 0.1, Ts);

  SECTION("A_d = I + Ts*A_c, B_d = Ts*B_c, E_d = Ts*E_c") {
    CHECK(m.A_d.m[0][0] == Catch::Approx(1.0 + Ts * m.A_c.m[0][0]).epsilon(1e-14));
    CHECK(m.A_d.m[0][1] == Catch::Approx(Ts * m.A_c.m[0][1]).margin(1e-16));
    CHECK(m.A_d.m[1][0] == Catch::Approx(Ts * m.A_c.m[1][0]).margin(1e-16));
    CHECK(m.A_d.m[1][1] == Catch::Approx(1.0 + Ts * m.A_c.m[1][1]).epsilon(1e-14));
    CHECK(m.B_d[0] == Catch::Approx(Ts * m.B_c[0]).epsilon(1e-14));
    CHECK(m.B_d[1] == Catch::Approx(Ts * m.B_c[1]).epsilon(1e-14));
    CHECK(m.E_d[0] == Catch::Approx(Ts * m.E_c[0]).margin(1e-16));
    CHECK(m.E_d[1] == Catch::Approx(Ts * m.E_c[1]).margin(1e-16));
  }
  SECTION("Euler error against the matrix exponential is O(Ts^2)") {
    const Mat2 exact = testutil::expm2(m.A_c * Ts);
    const double err = (m.A_d - exact).frobenius_norm();
    // ||A_c|| ~ 35 at this speed; (Ts*||A||)^2/2 ~ 0.016
    CHECK(err < 0.5 * Ts * Ts * m.A_c.frobenius_norm() * m.A_c.frobenius_norm() * 1.5);
    CHECK(err > 0.0);
  }
}

TEST_CASE("x1 measurement from yaw rate") {
  // x1 = (L/v_x)*r - delta_f, hand arithmetic at the nominal point
  CHECK(measure_x1(0.1, 0.05, 18.06, kParams) ==
        Catch::Approx(2.33 / 18.06 * 0.1 - 0.05).epsilon(1e-14));
  CHECK(measure_x1(0.1, 0.05, 18.06, kParams) == Catch::Approx(-0.0370985).epsilon(1e-5));
  CHECK(measure_x1(0.0, 0.0, 18.06, kParams) == 0.0);
}

TEST_CASE("model is Hurwitz and observable across the speed range") {
  for (double v = 5.0; v <= 40.0; v += 0.5) {
    const CtrlModel m = build_continuous(kParams, v, 0.0, 0.0);
    for (const auto& lam : m.A_c.eigenvalues()) CHECK(lam.real() < 0.0);
    CHECK(std::abs(m.C_c.det()) > 1e-6);
  }
}

TEST_CASE("steer rate filter") {
  SteerRateFilter f(0.02);
  SECTION("constant input gives zero rate") {
    double r = 0.0;
    for (int i = 0; i < 100; ++i) r = f.update(0.05, 0.005);
    CHECK(std::abs(r) < 1e-9);
  }
  SECTION("ramp input converges to the slope") {
    SteerRateFilter g(0.02);
    double r = 0.0;
    const double slope = 0.4;
    for (int i = 1; i <= 200; ++i) r = g.update(slope * i * 0.005, 0.005);
    CHECK(r == Catch::Approx(slope).epsilon(0.02));
  }
}

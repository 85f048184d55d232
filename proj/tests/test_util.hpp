#pragma once

// Shared oracles for the test suite. Everything here is deliberately an
// independent computation path from the library implementation.

#include <cmath>
#include <random>
#include <vector>

#include "slipgap/ctrl_model.hpp"
#include "slipgap/linalg.hpp"
#include "slipgap/params.hpp"

namespace slipgap::testutil {

// Independent re-derivation of the sideslip-difference model: start from the
// per-axle slip dynamics written in [alpha_f, alpha_r] coordinates (linear
// band, F = -C*alpha) and change basis with x = [alpha_f - alpha_r, alpha_r].
struct DerivedModel {
  Mat2 A;
  Vec2 B, E;
  Mat2 C;
  Vec2 D;
};

inline DerivedModel rederive_model(const VehicleParams& p, double v, double delta_f,
                                   double delta_f_dot) {
  const double L = p.l_f + p.l_r;

  // d/dt [alpha_f, alpha_r] = P * [alpha_f, alpha_r] + B_a * M_z + E_a
  Mat2 P;
  P(0, 0) = -p.C_f / (p.m * v) - p.l_f * p.l_f * p.C_f / (p.I_z * v) - v / L;
  P(0, 1) = -p.C_r / (p.m * v) + p.l_f * p.l_r * p.C_r / (p.I_z * v) + v / L;
  P(1, 0) = -p.C_f / (p.m * v) + p.l_r * p.l_f * p.C_f / (p.I_z * v) - v / L;
  P(1, 1) = -p.C_r / (p.m * v) - p.l_r * p.l_r * p.C_r / (p.I_z * v) + v / L;
  const Vec2 B_a = {{p.l_f / (p.I_z * v), -p.l_r / (p.I_z * v)}};
  const Vec2 E_a = {{-v / L * delta_f - delta_f_dot, -v / L * delta_f}};

  // Basis change x = S * alpha, S = [[1, -1], [0, 1]].
  const Mat2 S = {{{1.0, -1.0}, {0.0, 1.0}}};
  const Mat2 S_inv = {{{1.0, 1.0}, {0.0, 1.0}}};

  DerivedModel m;
  m.A = S * P * S_inv;
  m.B = S * B_a;
  m.E = S * E_a;

  // Outputs: r from the sideslip-difference identity, a_y from the axle
  // forces in alpha coordinates mapped through S_inv.
  m.C(0, 0) = v / L;
  m.C(0, 1) = 0.0;
  const double cf = -p.C_f / p.m, cr = -p.C_r / p.m;
  m.C(1, 0) = cf * S_inv(0, 0) + cr * S_inv(1, 0);
  m.C(1, 1) = cf * S_inv(0, 1) + cr * S_inv(1, 1);
  m.D = {{v / L * delta_f, 0.0}};
  return m;
}

// Matrix exponential of a 2x2 via scaling-and-squaring on the Taylor series.
inline Mat2 expm2(const Mat2& A) {
  int s = 0;
  double nrm = A.frobenius_norm();
  while (nrm > 0.5) {
    nrm /= 2.0;
    ++s;
  }
  Mat2 As = A * std::pow(0.5, s);
  Mat2 result = Mat2::identity();
  Mat2 term = Mat2::identity();
  for (int k = 1; k <= 24; ++k) {
    term = term * As * (1.0 / k);
    result = result + term;
  }
  for (int i = 0; i < s; ++i) result = result * result;
  return result;
}

// Least-squares slope of log(values) over uniformly spaced samples; used to
// fit exponential decay rates.
inline double fit_log_slope(const std::vector<double>& t, const std::vector<double>& y) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  const std::size_t n = t.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double ly = std::log(y[i]);
    st += t[i];
    sy += ly;
    stt += t[i] * t[i];
    sty += t[i] * ly;
  }
  return (n * sty - st * sy) / (n * stt - st * st);
}

}  // namespace slipgap::testutil

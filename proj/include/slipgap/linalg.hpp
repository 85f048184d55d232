#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

// Minimal fixed-size 2D linear algebra. Everything in this project is a
// 2-state system, so a hand-rolled Vec2/Mat2 keeps the dependency surface
// at zero and the numerics transparent.

namespace slipgap {

struct Vec2 {
  double v[2]{0.0, 0.0};

  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }

  Vec2 operator+(const Vec2& o) const { return {{v[0] + o.v[0], v[1] + o.v[1]}}; }
  Vec2 operator-(const Vec2& o) const { return {{v[0] - o.v[0], v[1] - o.v[1]}}; }
  Vec2 operator*(double s) const { return {{v[0] * s, v[1] * s}}; }

  double dot(const Vec2& o) const { return v[0] * o.v[0] + v[1] * o.v[1]; }
  double norm() const { return std::sqrt(dot(*this)); }
  bool finite() const { return std::isfinite(v[0]) && std::isfinite(v[1]); }
};

inline Vec2 operator*(double s, const Vec2& a) { return a * s; }

struct Mat2 {
  // Row-major: m[row][col].
  double m[2][2]{{0.0, 0.0}, {0.0, 0.0}};

  double& operator()(int r, int c) { return m[r][c]; }
  double operator()(int r, int c) const { return m[r][c]; }

  static Mat2 identity() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }

  Mat2 operator+(const Mat2& o) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
    return r;
  }
  Mat2 operator-(const Mat2& o) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
    return r;
  }
  Mat2 operator*(double s) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] * s;
    return r;
  }
  Mat2 operator*(const Mat2& o) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
    return r;
  }
  Vec2 operator*(const Vec2& x) const {
    return {{m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]}};
  }

  double trace() const { return m[0][0] + m[1][1]; }
  double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

  Mat2 transpose() const { return {{{m[0][0], m[1][0]}, {m[0][1], m[1][1]}}}; }

  Mat2 inverse() const {
    const double d = det();
    if (std::abs(d) < 1e-300) throw std::runtime_error("Mat2::inverse: singular matrix");
    const double s = 1.0 / d;
    return {{{m[1][1] * s, -m[0][1] * s}, {-m[1][0] * s, m[0][0] * s}}};
  }

  // Eigenvalues via the characteristic polynomial; exact for 2x2.
  std::array<std::complex<double>, 2> eigenvalues() const {
    const double tr = trace();
    const double disc = tr * tr / 4.0 - det();
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      return {std::complex<double>(tr / 2.0 - s, 0.0), std::complex<double>(tr / 2.0 + s, 0.0)};
    }
    const double s = std::sqrt(-disc);
    return {std::complex<double>(tr / 2.0, -s), std::complex<double>(tr / 2.0, s)};
  }

  bool finite() const {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        if (!std::isfinite(m[i][j])) return false;
    return true;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) s += m[i][j] * m[i][j];
    return std::sqrt(s);
  }
};

}  // namespace slipgap

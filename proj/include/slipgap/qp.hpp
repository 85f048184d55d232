#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

// Dense box-constrained QP: minimize 0.5 u'Hu + f'u subject to lb <= u <= ub,
// H symmetric positive definite. Primal active-set method; the problem sizes
// here are tiny (horizon-length vectors), so exact subspace solves per
// iteration are the simplest route to deterministic, high-accuracy answers.

namespace slipgap {

struct BoxQp {
  std::vector<std::vector<double>> H;
  std::vector<double> f;
  std::vector<double> lb;
  std::vector<double> ub;

  std::size_t size() const { return f.size(); }

  void validate() const {
    const std::size_t n = f.size();
    if (H.size() != n || lb.size() != n || ub.size() != n)
      throw std::invalid_argument("BoxQp: inconsistent dimensions");
    for (const auto& row : H)
      if (row.size() != n) throw std::invalid_argument("BoxQp: H is not square");
    for (std::size_t i = 0; i < n; ++i)
      if (lb[i] > ub[i]) throw std::invalid_argument("BoxQp: lb > ub");
  }

  double cost(const std::vector<double>& u) const {
    const std::size_t n = size();
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double hu = 0.0;
      for (std::size_t j = 0; j < n; ++j) hu += H[i][j] * u[j];
      c += 0.5 * u[i] * hu + f[i] * u[i];
    }
    return c;
  }
};

struct QpResult {
  std::vector<double> u;
  int iterations = 0;
  bool degraded = false;  // iteration cap hit; u is the best feasible iterate
  double cost = 0.0;
};

namespace detail {

// Gaussian elimination with partial pivoting; n is at most the horizon length.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
    if (std::abs(A[piv][k]) < 1e-300) throw std::runtime_error("solve_dense: singular system");
    std::swap(A[k], A[piv]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = A[i][k] / A[k][k];
      if (m == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) A[i][j] -= m * A[k][j];
      b[i] -= m * b[k];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
    x[i] = s / A[i][i];
  }
  return x;
}

}  // namespace detail

// Active-set iteration: fix variables at their bounds, take the exact Newton
// step on the free subspace, add the first blocking bound on the way, and
// release the bound with the most negative multiplier once stationary.
// Ties break to the lowest index, so the result is bit-deterministic.
inline QpResult solve_box_qp(const BoxQp& qp, const std::vector<double>* warm_start = nullptr,
                             int max_iterations = 1000) {
  qp.validate();
  const std::size_t n = qp.size();
  QpResult res;
  res.u.assign(n, 0.0);
  if (n == 0) return res;

  std::vector<double>& u = res.u;
  if (warm_start && warm_start->size() == n) u = *warm_start;
  for (std::size_t i = 0; i < n; ++i) u[i] = std::min(std::max(u[i], qp.lb[i]), qp.ub[i]);

  // -1 free, 0 at lower bound, 1 at upper bound
  std::vector<int> at_bound(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] <= qp.lb[i]) at_bound[i] = 0;
    else if (u[i] >= qp.ub[i]) at_bound[i] = 1;
  }

  auto gradient = [&](std::vector<double>& g) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = qp.f[i];
      for (std::size_t j = 0; j < n; ++j) s += qp.H[i][j] * u[j];
      g[i] = s;
    }
  };

  std::vector<double> g(n);
  const double tol = 1e-10;

  for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
    // Free-variable index set.
    std::vector<std::size_t> free_idx;
    for (std::size_t i = 0; i < n; ++i)
      if (at_bound[i] < 0) free_idx.push_back(i);

    gradient(g);

    if (!free_idx.empty()) {
      // Newton step on the free subspace: H_ff d = -g_f.
      const std::size_t nf = free_idx.size();
      std::vector<std::vector<double>> Hff(nf, std::vector<double>(nf));
      std::vector<double> gf(nf);
      for (std::size_t a = 0; a < nf; ++a) {
        gf[a] = -g[free_idx[a]];
        for (std::size_t b = 0; b < nf; ++b) Hff[a][b] = qp.H[free_idx[a]][free_idx[b]];
      }
      std::vector<double> d = detail::solve_dense(Hff, gf);

      double dmax = 0.0;
      for (double v : d) dmax = std::max(dmax, std::abs(v));

      if (dmax > tol) {
        // Step length to the first blocking bound.
        double alpha = 1.0;
        std::size_t blocking = n;
        int blocking_side = -1;
        for (std::size_t a = 0; a < nf; ++a) {
          const std::size_t i = free_idx[a];
          if (d[a] > tol) {
            const double step = (qp.ub[i] - u[i]) / d[a];
            if (step < alpha - 1e-15) {
              alpha = step;
              blocking = i;
              blocking_side = 1;
            }
          } else if (d[a] < -tol) {
            const double step = (qp.lb[i] - u[i]) / d[a];
            if (step < alpha - 1e-15) {
              alpha = step;
              blocking = i;
              blocking_side = 0;
            }
          }
        }
        alpha = std::max(alpha, 0.0);
        for (std::size_t a = 0; a < nf; ++a) u[free_idx[a]] += alpha * d[a];
        if (blocking < n) {
          u[blocking] = (blocking_side == 1) ? qp.ub[blocking] : qp.lb[blocking];
          at_bound[blocking] = blocking_side;
          continue;
        }
        continue;  // full step; re-check stationarity next pass
      }
    }

    // Stationary on the free subspace: check bound multipliers.
    gradient(g);
    std::size_t release = n;
    double worst = -tol;
    for (std::size_t i = 0; i < n; ++i) {
      if (at_bound[i] == 0 && g[i] < worst) {  // at lower bound, wants to increase
        worst = g[i];
        release = i;
      } else if (at_bound[i] == 1 && -g[i] < worst) {  // at upper bound, wants to decrease
        worst = -g[i];
        release = i;
      }
    }
    if (release == n) {
      res.cost = qp.cost(u);
      return res;  // KKT satisfied
    }
    at_bound[release] = -1;
  }

  res.degraded = true;
  res.cost = qp.cost(u);
  return res;
}

}  // namespace slipgap

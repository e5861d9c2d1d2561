#include "frm/simplex.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

namespace frm::lp {

namespace {

constexpr double kPivotTol = 1e-11;

// Tableau rows hold B^{-1}[A | I | b]; `basis[i]` is the variable basic in
// row i. Columns n..n+m-1 are the artificials.
struct Tableau {
  std::size_t m, n;
  std::vector<std::vector<double>> d;
  std::vector<std::size_t> basis;

  double& rhs(std::size_t i) { return d[i][n + m]; }
  double rhs(std::size_t i) const { return d[i][n + m]; }

  void pivot(std::size_t row, std::size_t col) {
    const double inv = 1.0 / d[row][col];
    for (double& e : d[row]) e *= inv;
    d[row][col] = 1.0;  // kill residual roundoff on the pivot itself
    for (std::size_t i = 0; i < m; ++i) {
      if (i == row) continue;
      const double f = d[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n + m; ++j) d[i][j] -= f * d[row][j];
      d[i][col] = 0.0;
    }
    basis[row] = col;
  }
};

// Runs Bland-rule simplex for the given cost vector over eligible columns.
// Returns false when the objective is unbounded below.
bool run_simplex(Tableau& t, const std::vector<double>& cost, const std::vector<bool>& eligible,
                 double tol) {
  const std::size_t ncols = t.n + t.m;
  for (;;) {
    // Reduced costs r_j = c_j - c_B^T (column j of the reduced tableau).
    std::size_t enter = ncols;
    for (std::size_t j = 0; j < ncols; ++j) {
      if (!eligible[j]) continue;
      bool basic = false;
      for (std::size_t i = 0; i < t.m; ++i) {
        if (t.basis[i] == j) {
          basic = true;
          break;
        }
      }
      if (basic) continue;
      double r = cost[j];
      for (std::size_t i = 0; i < t.m; ++i) r -= cost[t.basis[i]] * t.d[i][j];
      if (r < -tol) {
        enter = j;  // Bland: first eligible index with negative reduced cost
        break;
      }
    }
    if (enter == ncols) return true;

    std::size_t leave = t.m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.m; ++i) {
      if (t.d[i][enter] <= kPivotTol) continue;
      const double ratio = t.rhs(i) / t.d[i][enter];
      if (ratio < best_ratio - kPivotTol ||
          (ratio < best_ratio + kPivotTol && (leave == t.m || t.basis[i] < t.basis[leave]))) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave == t.m) return false;
    t.pivot(leave, enter);
  }
}

}  // namespace

Result solve(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
             const std::vector<double>& c, double tol) {
  const std::size_t m = a.size();
  const std::size_t n = c.size();
  if (b.size() != m) throw std::invalid_argument("lp::solve: |b| != rows of A");
  for (const auto& row : a) {
    if (row.size() != n) throw std::invalid_argument("lp::solve: ragged constraint matrix");
  }

  if (m == 0) {
    Result res;
    for (double cj : c) {
      if (cj < -tol) {
        res.status = Status::Unbounded;
        return res;
      }
    }
    res.x.assign(n, 0.0);
    return res;
  }

  Tableau t;
  t.m = m;
  t.n = n;
  t.d.assign(m, std::vector<double>(n + m + 1, 0.0));
  t.basis.resize(m);
  double bmax = 0.0;
  for (double bi : b) bmax = std::max(bmax, std::abs(bi));
  const double feas_tol = tol * (1.0 + bmax);

  for (std::size_t i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t.d[i][j] = sign * a[i][j];
    t.d[i][n + i] = 1.0;
    t.rhs(i) = sign * b[i];
    t.basis[i] = n + i;
  }

  // Phase 1: minimize the artificial mass.
  std::vector<double> phase1_cost(n + m, 0.0);
  for (std::size_t j = n; j < n + m; ++j) phase1_cost[j] = 1.0;
  std::vector<bool> all_eligible(n + m, true);
  run_simplex(t, phase1_cost, all_eligible, tol);

  double artificial_mass = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis[i] >= n) artificial_mass += t.rhs(i);
  }
  if (artificial_mass > feas_tol) {
    Result res;
    res.status = Status::Infeasible;
    // y^T = c_B^T B^{-1}; B^{-1} columns sit where the artificials started.
    // Undo the row-sign normalization so y certifies the original system.
    res.farkas.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      double y = 0.0;
      for (std::size_t k = 0; k < m; ++k) y += phase1_cost[t.basis[k]] * t.d[k][n + i];
      res.farkas[i] = (b[i] < 0.0 ? -1.0 : 1.0) * y;
    }
    res.objective = artificial_mass;
    return res;
  }

  // Pivot remaining artificials out; rows with no usable original column are
  // redundant constraints and stay parked at zero.
  std::vector<bool> eligible(n + m, false);
  for (std::size_t j = 0; j < n; ++j) eligible[j] = true;
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis[i] < n) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(t.d[i][j]) > kPivotTol) {
        t.pivot(i, j);
        break;
      }
    }
  }

  std::vector<double> phase2_cost(n + m, 0.0);
  for (std::size_t j = 0; j < n; ++j) phase2_cost[j] = c[j];
  if (!run_simplex(t, phase2_cost, eligible, tol)) {
    Result res;
    res.status = Status::Unbounded;
    return res;
  }

  Result res;
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis[i] < n) res.x[t.basis[i]] = t.rhs(i);
  }
  for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
  return res;
}

}  // namespace frm::lp

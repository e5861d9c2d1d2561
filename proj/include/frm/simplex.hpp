#pragma once

#include <vector>

namespace frm::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Optimal;
  double objective = 0.0;
  std::vector<double> x;       // primal solution when Optimal
  std::vector<double> farkas;  // when Infeasible: y with y^T A <= 0 (per column), y^T b > 0
};

// Minimizes c.x subject to A x = b, x >= 0.
//
// Dense two-phase tableau simplex with Bland's rule, intended for the tiny
// instances arising from risk polytopes (tens of variables). `tol` is the
// absolute feasibility tolerance on constraint residuals.
Result solve(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
             const std::vector<double>& c, double tol = 1e-9);

}  // namespace frm::lp

#include "frm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frm/simplex.hpp"

namespace frm {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

std::vector<double> helmert_row(std::size_t k, std::size_t m) {
  // k-th orthonormal complement vector of span(1) in R^m, k in [1, m-1]:
  // (1,...,1,-k,0,...,0) / sqrt(k(k+1)) with k leading ones.
  std::vector<double> v(m, 0.0);
  const double norm = std::sqrt(static_cast<double>(k) * static_cast<double>(k + 1));
  for (std::size_t i = 0; i < k; ++i) v[i] = 1.0 / norm;
  v[k] = -static_cast<double>(k) / norm;
  return v;
}

}  // namespace

RiskPolytope::RiskPolytope(GroupSpace s, std::vector<RiskProfile> verts) : space(std::move(s)) {
  if (verts.empty()) throw ShapeError("RiskPolytope: needs at least one vertex");
  for (const auto& v : verts) {
    check_same_space(v.space, space, "RiskPolytope vertex");
    bool dup = false;
    for (const auto& kept : vertices) {
      bool same = true;
      for (std::size_t i = 0; i < v.values.size(); ++i) {
        if (std::abs(v.values[i] - kept.values[i]) > 1e-12) {
          same = false;
          break;
        }
      }
      if (same) {
        dup = true;
        break;
      }
    }
    if (!dup) vertices.push_back(v);
  }
}

double RiskPolytope::tie_tol() const {
  double mag = 0.0;
  for (const auto& v : vertices) {
    for (double e : v.values) mag = std::max(mag, std::abs(e));
  }
  return 1e-7 * (1.0 + mag);
}

FairBasis FairBasis::make(const FairSubspace& fair) {
  FairBasis basis;
  basis.fair = fair;
  const std::size_t na = fair.space.num_groups();
  const std::size_t nv = fair.space.num_disc();
  if (fair.kind == FairKind::RiskParity) {
    const std::size_t m = na * nv;
    for (std::size_t k = 1; k < m; ++k) basis.vectors.push_back(helmert_row(k, m));
  } else {
    for (std::size_t v = 0; v < nv; ++v) {
      for (std::size_t k = 1; k < na; ++k) {
        const std::vector<double> col = helmert_row(k, na);
        std::vector<double> vec(na * nv, 0.0);
        for (std::size_t a = 0; a < na; ++a) vec[fair.space.cell(a, v)] = col[a];
        basis.vectors.push_back(std::move(vec));
      }
    }
  }
  return basis;
}

LinearMin minimize_linear(const RiskPolytope& poly, const GroupMarginal& cost) {
  check_same_space(poly.space, cost.space, "minimize_linear");
  LinearMin out;
  out.value = std::numeric_limits<double>::infinity();
  std::vector<double> vals(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) {
    vals[i] = dot(cost.probs, poly.vertices[i].values);
    out.value = std::min(out.value, vals[i]);
  }
  const double tol = poly.tie_tol();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (vals[i] <= out.value + tol) out.argmin.push_back(i);
  }
  return out;
}

FairMin minimize_linear_fair(const RiskPolytope& poly, const GroupMarginal& cost,
                             const FairSubspace& fair) {
  check_same_space(poly.space, cost.space, "minimize_linear_fair");
  check_same_space(poly.space, fair.space, "minimize_linear_fair");

  const std::size_t n = poly.size();
  const FairBasis basis = FairBasis::make(fair);
  const std::size_t nb = basis.vectors.size();

  // Variables: mixture weights. Rows: sum-to-one, then <b_k, sum_i w_i V_i> = 0.
  std::vector<std::vector<double>> a(1 + nb, std::vector<double>(n, 0.0));
  std::vector<double> b(1 + nb, 0.0);
  std::vector<double> c(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    a[0][i] = 1.0;
    c[i] = dot(cost.probs, poly.vertices[i].values);
    for (std::size_t k = 0; k < nb; ++k) a[1 + k][i] = dot(basis.vectors[k], poly.vertices[i].values);
  }
  b[0] = 1.0;

  const lp::Result res = lp::solve(a, b, c);
  if (res.status == lp::Status::Infeasible) {
    // Map the Farkas dual back to a separating functional in F-perp:
    // s = sum_k y_{1+k} b_k satisfies <s, V_i> <= -y_0 < 0 for all vertices
    // while <s, f> = 0 on the fair subspace.
    std::vector<double> sep(poly.space.num_cells(), 0.0);
    for (std::size_t k = 0; k < nb; ++k) {
      for (std::size_t j = 0; j < sep.size(); ++j) sep[j] += res.farkas[1 + k] * basis.vectors[k][j];
    }
    throw InfeasibleError("minimize_linear_fair: hull does not meet the fair subspace", sep,
                          res.farkas[0]);
  }
  if (res.status != lp::Status::Optimal)
    throw Error("minimize_linear_fair: unexpected LP status");

  FairMin out;
  out.value = res.objective;
  out.weights = res.x;
  std::vector<double> mix(poly.space.num_cells(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < mix.size(); ++j) mix[j] += res.x[i] * poly.vertices[i].values[j];
  }
  out.profile = RiskProfile(poly.space, std::move(mix));
  return out;
}

HarmVerdict RpThreshold::verdict(double p_majority) const {
  if (!defined) return delta_minority <= 0.0 ? HarmVerdict::Harm : HarmVerdict::Help;
  if (harm_above) return p_majority >= threshold ? HarmVerdict::Harm : HarmVerdict::Help;
  return p_majority <= threshold ? HarmVerdict::Harm : HarmVerdict::Help;
}

RpThreshold rp_threshold(const RiskProfile& r_tilde, const RiskProfile& r_tilde_fair,
                         std::size_t majority_index) {
  check_same_space(r_tilde.space, r_tilde_fair.space, "rp_threshold");
  if (r_tilde.values.size() != 2)
    throw ShapeError("rp_threshold: supported only for two-group risk-parity profiles");
  if (majority_index > 1) throw ShapeError("rp_threshold: majority index out of range");

  const std::size_t minority_index = 1 - majority_index;
  const double r_maj = r_tilde.values[majority_index];
  const double r_min = r_tilde.values[minority_index];
  const double f_min = r_tilde_fair.values[minority_index];

  double mag = 0.0;
  for (double e : r_tilde.values) mag = std::max(mag, std::abs(e));
  const double tol = 1e-7 * (1.0 + mag);

  RpThreshold out;
  out.delta_minority = r_min - f_min;
  if (std::abs(r_min - r_maj) <= tol) return out;  // unconstrained optimum already fair
  out.defined = true;
  out.threshold = (r_min - f_min) / (r_min - r_maj);
  out.harm_above = r_min > r_maj;
  return out;
}

bool normal_cone_member(const RiskPolytope& poly, const RiskProfile& point,
                        std::span<const double> c) {
  check_same_space(poly.space, point.space, "normal_cone_member");
  if (c.size() != point.values.size()) throw ShapeError("normal_cone_member: wrong direction size");
  const double tol = poly.tie_tol();
  for (const auto& v : poly.vertices) {
    double s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) s += c[j] * (v.values[j] - point.values[j]);
    if (s > tol) return false;
  }
  return true;
}

bool bayes_fair_check(const RiskPolytope& poly, const GroupMarginal& p_star,
                      const FairSubspace& fair) {
  const LinearMin m = minimize_linear(poly, p_star);
  const double tol = poly.tie_tol();
  for (std::size_t i : m.argmin) {
    if (fairness_gap(poly.vertices[i], fair) > tol) return false;
  }
  return true;
}

RecoveryVerdict recovery_condition(const RiskPolytope& poly, const GroupMarginal& p_star,
                                   const GroupMarginal& p_tilde, const FairSubspace& fair) {
  check_same_space(poly.space, p_star.space, "recovery_condition");
  check_same_space(poly.space, p_tilde.space, "recovery_condition");
  if (!bayes_fair_check(poly, p_star, fair))
    throw PreconditionError("recovery_condition: unconstrained p_star minimizer is not fair");

  const LinearMin unbiased = minimize_linear(poly, p_star);
  // Designated representative: lexicographically smallest argmin vertex.
  std::size_t star = unbiased.argmin[0];
  for (std::size_t i : unbiased.argmin) {
    if (std::lexicographical_compare(poly.vertices[i].values.begin(), poly.vertices[i].values.end(),
                                     poly.vertices[star].values.begin(),
                                     poly.vertices[star].values.end()))
      star = i;
  }
  const RiskProfile& r_star = poly.vertices[star];

  // x = proj_F(p* - p~) - p*
  std::vector<double> diff(p_star.probs.size());
  for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = p_star.probs[j] - p_tilde.probs[j];
  std::vector<double> x = project_fair(std::span<const double>(diff), fair);
  for (std::size_t j = 0; j < x.size(); ++j) x[j] -= p_star.probs[j];

  const FairBasis basis = FairBasis::make(fair);
  const std::size_t nb = basis.vectors.size();
  const std::size_t n = poly.size();

  // Edge directions d_i = V_i - R* and their products with x / the basis.
  std::vector<double> g(n, 0.0);
  std::vector<std::vector<double>> m_edge(n, std::vector<double>(nb, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> d(x.size());
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = poly.vertices[i].values[j] - r_star.values[j];
    g[i] = dot(x, d);
    for (std::size_t k = 0; k < nb; ++k) m_edge[i][k] = dot(basis.vectors[k], d);
  }

  // Minimize the worst violation over f = sum_k t_k b_k:
  //   min v  s.t.  g_i - sum_k t_k M_ik <= v  for all i,  v >= -1.
  // Recoverable iff the optimum is <= 0. Variables: t split into +/- parts,
  // shifted v' = v + 1 >= 0, and one slack per vertex:
  //   sum_k (t+_k - t-_k) M_ik + v' - s_i = g_i + 1.
  const std::size_t nvar = 2 * nb + 1 + n;
  std::vector<std::vector<double>> a(n, std::vector<double>(nvar, 0.0));
  std::vector<double> b(n, 0.0);
  std::vector<double> c(nvar, 0.0);
  c[2 * nb] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < nb; ++k) {
      a[i][k] = m_edge[i][k];
      a[i][nb + k] = -m_edge[i][k];
    }
    a[i][2 * nb] = 1.0;
    a[i][2 * nb + 1 + i] = -1.0;
    b[i] = g[i] + 1.0;
  }

  const lp::Result res = lp::solve(a, b, c);
  if (res.status != lp::Status::Optimal)
    throw Error("recovery_condition: violation LP did not solve");

  RecoveryVerdict verdict;
  verdict.r_star = r_star;
  verdict.certificate.violation = res.objective - 1.0;

  verdict.certificate.fair_perp_witness.assign(x.size(), 0.0);
  for (std::size_t k = 0; k < nb; ++k) {
    const double t = res.x[k] - res.x[nb + k];
    for (std::size_t j = 0; j < x.size(); ++j)
      verdict.certificate.fair_perp_witness[j] += t * basis.vectors[k][j];
  }

  const double tol = 1e-9 * (1.0 + std::abs(res.objective));
  verdict.recoverable = verdict.certificate.violation <= tol;
  if (!verdict.recoverable) {
    // Which vertex inequality stays violated under the best witness.
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      double lhs = g[i];
      for (std::size_t k = 0; k < nb; ++k) lhs -= (res.x[k] - res.x[nb + k]) * m_edge[i][k];
      if (lhs > worst) {
        worst = lhs;
        verdict.certificate.violated_vertex = static_cast<std::ptrdiff_t>(i);
      }
    }
  }

  verdict.fair_optimum_under_bias = minimize_linear_fair(poly, p_tilde, fair).profile;
  return verdict;
}

BiasDecomposition decompose_bias(const GroupMarginal& p_star, const GroupMarginal& p_tilde,
                                 const FairSubspace& fair) {
  check_same_space(p_star.space, p_tilde.space, "decompose_bias");
  check_same_space(p_star.space, fair.space, "decompose_bias");
  std::vector<double> delta(p_star.probs.size());
  for (std::size_t j = 0; j < delta.size(); ++j) delta[j] = p_tilde.probs[j] - p_star.probs[j];
  BiasDecomposition out;
  out.residual = project_fair(std::span<const double>(delta), fair);
  out.orthogonal.resize(delta.size());
  for (std::size_t j = 0; j < delta.size(); ++j) out.orthogonal[j] = delta[j] - out.residual[j];
  return out;
}

bool orthogonality_check(const GroupMarginal& p_star, const GroupMarginal& p_tilde,
                         const FairSubspace& fair) {
  const BiasDecomposition d = decompose_bias(p_star, p_tilde, fair);
  double mag = 0.0;
  for (double e : d.residual) mag = std::max(mag, std::abs(e));
  return mag <= 1e-9;
}

}  // namespace frm

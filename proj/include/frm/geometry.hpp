#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "frm/types.hpp"

namespace frm {

// Achievable risk set, represented by its vertex profiles. The convex hull
// (mixtures of classifiers) is implicit and never materialized.
struct RiskPolytope {
  GroupSpace space;
  std::vector<RiskProfile> vertices;

  RiskPolytope() = default;
  // Deduplicates vertices that coincide within 1e-12 per entry.
  RiskPolytope(GroupSpace s, std::vector<RiskProfile> verts);

  std::size_t size() const { return vertices.size(); }
  // Scale-aware comparison tolerance for argmin / fairness decisions.
  double tie_tol() const;
};

// Orthonormal basis of the orthogonal complement of the fair subspace.
struct FairBasis {
  FairSubspace fair;
  std::vector<std::vector<double>> vectors;

  static FairBasis make(const FairSubspace& fair);
};

struct LinearMin {
  double value = 0.0;
  std::vector<std::size_t> argmin;  // all vertices within tie tolerance of the optimum
};

// Minimum of <cost, .> over the polytope; attained at vertices.
LinearMin minimize_linear(const RiskPolytope& poly, const GroupMarginal& cost);

struct FairMin {
  double value = 0.0;
  RiskProfile profile;           // optimal mixture profile, lies in the fair subspace
  std::vector<double> weights;   // mixture weights over vertices
};

// Minimum of <cost, .> over hull(vertices) intersected with the fair
// subspace, solved as an LP over mixture weights. Throws InfeasibleError
// (with a separating functional in F-perp) when the hull misses the subspace.
FairMin minimize_linear_fair(const RiskPolytope& poly, const GroupMarginal& cost,
                             const FairSubspace& fair);

enum class HarmVerdict { Harm, Help };

// Two-group risk-parity harm threshold. With majority mass p in the target
// domain, enforcing parity harms overall target risk when p falls on the
// `harm_above` side of `threshold`. Undefined when the unconstrained
// optimum already has equal group risks.
struct RpThreshold {
  bool defined = false;
  double threshold = 0.0;
  bool harm_above = true;  // Harm when p >= threshold; otherwise Harm when p <= threshold
  double delta_minority = 0.0;  // (R~)_minor - (R~_F)_minor, decides the degenerate case

  HarmVerdict verdict(double p_majority) const;
};

RpThreshold rp_threshold(const RiskProfile& r_tilde, const RiskProfile& r_tilde_fair,
                         std::size_t majority_index);

// True iff <c, V_i - point> <= tol for every vertex, i.e. c lies in the
// normal cone of the hull at `point`.
bool normal_cone_member(const RiskPolytope& poly, const RiskProfile& point,
                        std::span<const double> c);

// True iff every vertex attaining the unconstrained minimum under p_star
// lies in the fair subspace (so the whole argmin face does).
bool bayes_fair_check(const RiskPolytope& poly, const GroupMarginal& p_star,
                      const FairSubspace& fair);

struct RecoveryCertificate {
  // Best witness f in F-perp; when recoverable, <x - f, V_i - R*> <= tol
  // for every vertex i.
  std::vector<double> fair_perp_witness;
  // min over f of max_i <x - f, V_i - R*>; <= 0 iff recoverable.
  double violation = 0.0;
  // Vertex attaining that max when not recoverable, else -1.
  std::ptrdiff_t violated_vertex = -1;
};

struct RecoveryVerdict {
  bool recoverable = false;
  RiskProfile r_star;                   // designated unbiased optimum
  RiskProfile fair_optimum_under_bias;  // fair minimizer under p_tilde
  RecoveryCertificate certificate;
};

// Decides whether fair risk minimization on p_tilde recovers the unbiased
// optimum: tests x = proj_F(p* - p~) - p* for membership in
// N(R*) + F-perp via LP feasibility over F-perp coordinates.
// Requires the unconstrained p_star argmin to be fair (PreconditionError
// otherwise).
RecoveryVerdict recovery_condition(const RiskPolytope& poly, const GroupMarginal& p_star,
                                   const GroupMarginal& p_tilde, const FairSubspace& fair);

struct BiasDecomposition {
  std::vector<double> orthogonal;  // component of p~ - p* in F-perp; parity training absorbs it
  std::vector<double> residual;    // component in F
};

BiasDecomposition decompose_bias(const GroupMarginal& p_star, const GroupMarginal& p_tilde,
                                 const FairSubspace& fair);

// True iff p~ - p* lies entirely in F-perp (the sufficient condition for
// recovery): equal column sums for CRP, always true for RP probabilities.
bool orthogonality_check(const GroupMarginal& p_star, const GroupMarginal& p_tilde,
                         const FairSubspace& fair);

}  // namespace frm

// Regenerates the versioned fixture files under fixtures/. The shipped
// counterexample instance is found by seeded random search and re-verified
// before writing; the other instances are fixed worked examples.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "frm/data_io.hpp"
#include "frm/geometry.hpp"
#include "frm/harness.hpp"
#include "frm/rng.hpp"
#include "frm/types.hpp"

using namespace frm;

namespace {

GroupSpace crp_space() { return GroupSpace({"0", "1"}, {"0", "1"}); }
GroupSpace rp_space() { return GroupSpace({"0", "1"}, {"all"}); }

std::vector<double> random_probs(CounterRng& rng, std::size_t n) {
  std::vector<double> p(n);
  double total = 0.0;
  for (double& e : p) {
    e = 0.05 + rng.next_double();
    total += e;
  }
  for (double& e : p) e /= total;
  return p;
}

// Searches for a CRP instance where the unbiased argmin is fair yet the fair
// minimizer under the biased marginal strictly harms target risk.
bool find_counterexample(std::uint64_t seed, double harm_margin, RiskPolytope& out_poly,
                         GroupMarginal& out_p_tilde) {
  const GroupSpace space = crp_space();
  const FairSubspace fair(space, FairKind::ConditionalRiskParity);
  const GroupMarginal p_star(space, {0.25, 0.25, 0.25, 0.25});
  CounterRng rng(seed, 0xce);

  for (int attempt = 0; attempt < 200000; ++attempt) {
    const std::size_t n = 4 + rng.next_below(3);
    std::vector<RiskProfile> verts;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v(4);
      for (double& e : v) e = rng.next_double();
      verts.emplace_back(space, std::move(v));
    }
    // Make vertex 0 fair and the unique p_star argmin with a 15% margin.
    verts[0] = project_fair(verts[0], fair);
    double best_other = 1e9;
    for (std::size_t i = 1; i < n; ++i)
      best_other = std::min(best_other, overall_risk(p_star, verts[i]));
    const double cur = overall_risk(p_star, verts[0]);
    if (cur <= 1e-6 || best_other <= 1e-3) continue;
    const double scale = std::min(1.0, 0.85 * best_other / cur);
    for (double& e : verts[0].values) e *= scale;

    RiskPolytope poly(space, verts);
    if (poly.size() != n) continue;  // dedup collapsed something
    if (!bayes_fair_check(poly, p_star, fair)) continue;

    const GroupMarginal p_tilde(space, random_probs(rng, 4));
    const CounterexampleReport rep = evaluate_counterexample(poly, p_star, p_tilde, fair);
    if (rep.risk_unconstrained < rep.risk_fair - harm_margin) {
      out_poly = poly;
      out_p_tilde = p_tilde;
      std::cout << "counterexample found on attempt " << attempt + 1 << ": <P*,R~> = "
                << rep.risk_unconstrained << ", <P*,R~_F> = " << rep.risk_fair << "\n";
      return true;
    }
  }
  return false;
}

void write_marginal(const GroupMarginal& m, const std::string& path) {
  save_matrix_csv(m.space, m.probs, path);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string root = argc > 1 ? argv[1] : "fixtures";
  namespace fs = std::filesystem;
  for (const char* sub : {"counterexample", "rp_instance", "recovery_example", "orthogonal_example"})
    fs::create_directories(root + "/" + sub);

  {
    RiskPolytope poly;
    GroupMarginal p_tilde;
    if (!find_counterexample(20240117, 0.02, poly, p_tilde)) {
      std::cerr << "counterexample search exhausted\n";
      return 1;
    }
    save_polytope_csv(poly, root + "/counterexample/vertices.csv");
    write_marginal(GroupMarginal(crp_space(), {0.25, 0.25, 0.25, 0.25}),
                   root + "/counterexample/p_star.csv");
    write_marginal(p_tilde, root + "/counterexample/p_tilde.csv");
  }

  {
    // Two-group instance whose harm threshold sits at p_majority = 1/3.
    const GroupSpace space = rp_space();
    RiskPolytope poly(space, {RiskProfile(space, {0.1, 0.4}), RiskProfile(space, {0.3, 0.3}),
                              RiskProfile(space, {0.2, 0.5})});
    save_polytope_csv(poly, root + "/rp_instance/vertices.csv");
    write_marginal(GroupMarginal(space, {0.9, 0.1}), root + "/rp_instance/p_tilde.csv");
  }

  {
    // Risk-parity recovery demo: any biased marginal recovers the fair
    // unbiased optimum.
    const GroupSpace space = rp_space();
    RiskPolytope poly(space, {RiskProfile(space, {0.3, 0.3}), RiskProfile(space, {0.2, 0.5})});
    save_polytope_csv(poly, root + "/recovery_example/vertices.csv");
    write_marginal(GroupMarginal(space, {0.5, 0.5}), root + "/recovery_example/p_star.csv");
    write_marginal(GroupMarginal(space, {0.9, 0.1}), root + "/recovery_example/p_tilde.csv");
  }

  {
    // Bias confined to the orthogonal complement (equal column sums).
    const GroupSpace space = crp_space();
    RiskPolytope poly(space, {RiskProfile(space, {0.2, 0.2, 0.2, 0.2}),
                              RiskProfile(space, {0.5, 0.3, 0.6, 0.4})});
    save_polytope_csv(poly, root + "/orthogonal_example/vertices.csv");
    write_marginal(GroupMarginal(space, {0.25, 0.25, 0.25, 0.25}),
                   root + "/orthogonal_example/p_star.csv");
    write_marginal(GroupMarginal(space, {0.4, 0.4, 0.1, 0.1}),
                   root + "/orthogonal_example/p_tilde.csv");
  }

  std::cout << "fixtures written under " << root << "\n";
  return 0;
}

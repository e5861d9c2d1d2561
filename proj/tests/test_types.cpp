#include <doctest.h>

#include <cmath>
#include <vector>

#include "frm/dataset.hpp"
#include "frm/rng.hpp"
#include "frm/types.hpp"

using namespace frm;

namespace {

GroupSpace crp22() { return GroupSpace({"a0", "a1"}, {"v0", "v1"}); }
GroupSpace rp2() { return GroupSpace({"a0", "a1"}, {"all"}); }

std::vector<double> random_cells(CounterRng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& e : v) e = rng.next_uniform(-1.0, 1.0);
  return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("overall_risk computes the marginal-weighted expected loss") {
  const GroupSpace s = crp22();
  const GroupMarginal uniform(s, {0.25, 0.25, 0.25, 0.25});
  const RiskProfile prof(s, {0.2, 0.6, 0.4, 0.2});
  CHECK(overall_risk(uniform, prof) == doctest::Approx(0.35).epsilon(1e-12));

  const GroupSpace r = rp2();
  CHECK(overall_risk(GroupMarginal(r, {0.9, 0.1}), RiskProfile(r, {0.1, 0.4})) ==
        doctest::Approx(0.13).epsilon(1e-12));

  CHECK(overall_risk(uniform, RiskProfile(s, {0, 0, 0, 0})) == 0.0);

  const GroupSpace other({"x", "y"}, {"v0", "v1"});
  CHECK_THROWS_AS(overall_risk(GroupMarginal(other, {0.25, 0.25, 0.25, 0.25}), prof), ShapeError);
}

TEST_CASE("group marginal validation") {
  const GroupSpace s = rp2();
  CHECK_THROWS_AS(GroupMarginal(s, {0.5, 0.4}), ShapeError);   // mass != 1
  CHECK_THROWS_AS(GroupMarginal(s, {1.2, -0.2}), ShapeError);  // negative entry
  CHECK_THROWS_AS(GroupSpace({"a", "a"}, {"v"}), ShapeError);  // duplicate label
}

TEST_CASE("project_fair replicates column means (CRP) and the global mean (RP)") {
  const FairSubspace crp(crp22(), FairKind::ConditionalRiskParity);
  const RiskProfile x(crp22(), {0.2, 0.6, 0.4, 0.2});
  const RiskProfile px = project_fair(x, crp);
  const std::vector<double> want = {0.3, 0.4, 0.3, 0.4};
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(px.values[i] == doctest::Approx(want[i]).epsilon(1e-12));

  const RiskProfile fair_already(crp22(), {0.3, 0.4, 0.3, 0.4});
  const RiskProfile pf = project_fair(fair_already, crp);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(pf.values[i] == doctest::Approx(fair_already.values[i]).epsilon(1e-12));

  const FairSubspace rp(rp2(), FairKind::RiskParity);
  const RiskProfile y(rp2(), {0.2, 0.6});
  const RiskProfile py = project_fair(y, rp);
  CHECK(py.values[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(py.values[1] == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("project_fair_perp is the complement") {
  const FairSubspace crp(crp22(), FairKind::ConditionalRiskParity);
  const RiskProfile x(crp22(), {0.2, 0.6, 0.4, 0.2});
  const RiskProfile perp = project_fair_perp(x, crp);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(perp.values[i] ==
          doctest::Approx(std::vector<double>{-0.1, 0.2, 0.1, -0.2}[i]).epsilon(1e-12));

  const RiskProfile fair_input(crp22(), {0.3, 0.4, 0.3, 0.4});
  for (double e : project_fair_perp(fair_input, crp).values) CHECK(e == doctest::Approx(0.0));

  const FairSubspace rp(rp2(), FairKind::RiskParity);
  const RiskProfile y(rp2(), {0.2, 0.6});
  const RiskProfile yperp = project_fair_perp(y, rp);
  CHECK(yperp.values[0] == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(yperp.values[1] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("fairness_gap measures the worst across-group spread") {
  const FairSubspace crp(crp22(), FairKind::ConditionalRiskParity);
  CHECK(fairness_gap(RiskProfile(crp22(), {0.3, 0.4, 0.3, 0.4}), crp) == 0.0);
  CHECK(fairness_gap(RiskProfile(crp22(), {0.2, 0.6, 0.4, 0.2}), crp) ==
        doctest::Approx(0.4).epsilon(1e-12));
  const FairSubspace rp(rp2(), FairKind::RiskParity);
  CHECK(fairness_gap(RiskProfile(rp2(), {0.1, 0.4}), rp) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("projection properties: idempotence, orthogonality, gap iff perp zero") {
  CounterRng rng(101);
  for (int kind = 0; kind < 2; ++kind) {
    const FairSubspace fair =
        kind == 0 ? FairSubspace(crp22(), FairKind::ConditionalRiskParity)
                  : FairSubspace(rp2(), FairKind::RiskParity);
    const std::size_t cells = fair.space.num_cells();
    for (int it = 0; it < 200; ++it) {
      const std::vector<double> x = random_cells(rng, cells);
      const std::vector<double> y = random_cells(rng, cells);
      const std::vector<double> px = project_fair(std::span<const double>(x), fair);
      const std::vector<double> ppx = project_fair(std::span<const double>(px), fair);
      const std::vector<double> qx = project_fair_perp(std::span<const double>(x), fair);
      const std::vector<double> qy = project_fair_perp(std::span<const double>(y), fair);
      for (std::size_t i = 0; i < cells; ++i) {
        CHECK(std::abs(ppx[i] - px[i]) <= 1e-12);       // idempotent
        CHECK(std::abs(px[i] + qx[i] - x[i]) <= 1e-12);  // decomposition
      }
      CHECK(std::abs(dot(px, qy)) <= 1e-12);  // <F, F-perp> = 0

      double qnorm = 0.0;
      for (double e : qx) qnorm = std::max(qnorm, std::abs(e));
      const double gap = fairness_gap(std::span<const double>(x), fair);
      if (gap <= 1e-12) CHECK(qnorm <= 1e-12);
      if (qnorm <= 1e-12) CHECK(gap <= 1e-12);
    }
  }
}

TEST_CASE("empirical_risk_profile: per-cell means, strict empty-cell error, lenient mask") {
  LabeledDataset data;
  data.n = 4;
  data.dim = 1;
  data.features = {0, 0, 0, 0};
  data.group = {0, 0, 1, 1};
  data.label = {0, 1, 0, 0};  // cell (a1, pos) stays empty
  data.group_names = {"a0", "a1"};
  data.label_names = {"neg", "pos"};

  const GroupSpace rp = space_for(data, FairKind::RiskParity);
  const EmpiricalProfile prof = empirical_risk_profile({0, 1, 1, 0}, data, rp);
  CHECK(prof.profile.values == std::vector<double>{0.5, 0.5});
  CHECK(prof.cell_counts == std::vector<std::size_t>{2, 2});

  const EmpiricalProfile zeros = empirical_risk_profile({0, 0, 0, 0}, data, rp);
  CHECK(zeros.profile.values == std::vector<double>{0.0, 0.0});

  // Cell (a1, pos) has no rows.
  const GroupSpace crp = space_for(data, FairKind::ConditionalRiskParity);
  CHECK_THROWS_WITH_AS(empirical_risk_profile({0, 1, 1, 0}, data, crp),
                       doctest::Contains("a1"), DataError);
  const EmpiricalProfile lenient =
      empirical_risk_profile({0, 1, 1, 0}, data, crp, CellPolicy::Lenient);
  CHECK_FALSE(lenient.filled[crp.cell(1, 1)]);
  CHECK(lenient.filled[crp.cell(0, 0)]);
}

TEST_CASE("mixture linearity: profile of a mixed loss equals the mixed profiles") {
  CounterRng rng(202);
  LabeledDataset data;
  data.n = 60;
  data.dim = 1;
  data.features.assign(60, 0.0);
  data.group_names = {"a0", "a1"};
  data.label_names = {"neg", "pos"};
  for (std::size_t i = 0; i < data.n; ++i) {
    data.group.push_back(static_cast<int>(rng.next_below(2)));
    data.label.push_back(static_cast<int>(rng.next_below(2)));
  }
  const GroupSpace crp = space_for(data, FairKind::ConditionalRiskParity);

  std::vector<double> loss_a(data.n), loss_b(data.n), mixed(data.n);
  const double w = 0.3;
  for (std::size_t i = 0; i < data.n; ++i) {
    loss_a[i] = rng.next_double();
    loss_b[i] = rng.next_double();
    mixed[i] = w * loss_a[i] + (1 - w) * loss_b[i];
  }
  const RiskProfile pa = empirical_risk_profile(loss_a, data, crp).profile;
  const RiskProfile pb = empirical_risk_profile(loss_b, data, crp).profile;
  const RiskProfile pm = empirical_risk_profile(mixed, data, crp).profile;
  for (std::size_t c = 0; c < crp.num_cells(); ++c)
    CHECK(pm.values[c] == doctest::Approx(w * pa.values[c] + (1 - w) * pb.values[c]).epsilon(1e-12));
}

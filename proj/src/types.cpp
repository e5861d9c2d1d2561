#include "frm/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace frm {

namespace {

void check_unique(const std::vector<std::string>& labels, const char* what) {
  if (labels.empty()) throw ShapeError(std::string(what) + ": empty label list");
  std::set<std::string> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size()) throw ShapeError(std::string(what) + ": duplicate labels");
}

void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw ShapeError(std::string(what) + ": non-finite entry");
  }
}

}  // namespace

GroupSpace::GroupSpace(std::vector<std::string> g, std::vector<std::string> v)
    : groups(std::move(g)), disc_values(std::move(v)) {
  check_unique(groups, "GroupSpace.groups");
  check_unique(disc_values, "GroupSpace.disc_values");
}

RiskProfile::RiskProfile(GroupSpace s, std::vector<double> vals)
    : space(std::move(s)), values(std::move(vals)) {
  if (values.size() != space.num_cells())
    throw ShapeError("RiskProfile: " + std::to_string(values.size()) + " values for " +
                     std::to_string(space.num_cells()) + " cells");
  check_finite(values, "RiskProfile");
}

GroupMarginal::GroupMarginal(GroupSpace s, std::vector<double> p)
    : space(std::move(s)), probs(std::move(p)) {
  if (probs.size() != space.num_cells())
    throw ShapeError("GroupMarginal: " + std::to_string(probs.size()) + " entries for " +
                     std::to_string(space.num_cells()) + " cells");
  check_finite(probs, "GroupMarginal");
  double total = 0.0;
  for (double x : probs) {
    if (x < 0.0) throw ShapeError("GroupMarginal: negative probability");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ShapeError("GroupMarginal: total mass " + std::to_string(total) + " != 1");
}

void check_same_space(const GroupSpace& a, const GroupSpace& b, const char* what) {
  if (!(a == b)) throw ShapeError(std::string(what) + ": mismatched group spaces");
}

double overall_risk(const GroupMarginal& marginal, const RiskProfile& profile) {
  check_same_space(marginal.space, profile.space, "overall_risk");
  double acc = 0.0;
  for (std::size_t i = 0; i < marginal.probs.size(); ++i) acc += marginal.probs[i] * profile.values[i];
  return acc;
}

std::vector<double> project_fair(std::span<const double> x, const FairSubspace& fair) {
  const std::size_t na = fair.space.num_groups();
  const std::size_t nv = fair.space.num_disc();
  if (x.size() != na * nv) throw ShapeError("project_fair: wrong array size");
  std::vector<double> out(x.size());
  if (fair.kind == FairKind::RiskParity) {
    double mean = 0.0;
    for (double e : x) mean += e;
    mean /= static_cast<double>(x.size());
    std::fill(out.begin(), out.end(), mean);
  } else {
    for (std::size_t v = 0; v < nv; ++v) {
      double mean = 0.0;
      for (std::size_t a = 0; a < na; ++a) mean += x[fair.space.cell(a, v)];
      mean /= static_cast<double>(na);
      for (std::size_t a = 0; a < na; ++a) out[fair.space.cell(a, v)] = mean;
    }
  }
  return out;
}

RiskProfile project_fair(const RiskProfile& x, const FairSubspace& fair) {
  check_same_space(x.space, fair.space, "project_fair");
  return RiskProfile(x.space, project_fair(std::span<const double>(x.values), fair));
}

std::vector<double> project_fair_perp(std::span<const double> x, const FairSubspace& fair) {
  std::vector<double> out = project_fair(x, fair);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - out[i];
  return out;
}

RiskProfile project_fair_perp(const RiskProfile& x, const FairSubspace& fair) {
  check_same_space(x.space, fair.space, "project_fair_perp");
  return RiskProfile(x.space, project_fair_perp(std::span<const double>(x.values), fair));
}

double fairness_gap(std::span<const double> values, const FairSubspace& fair) {
  const std::size_t na = fair.space.num_groups();
  const std::size_t nv = fair.space.num_disc();
  if (values.size() != na * nv) throw ShapeError("fairness_gap: wrong array size");
  if (fair.kind == FairKind::RiskParity) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return *hi - *lo;
  }
  double worst = 0.0;
  for (std::size_t v = 0; v < nv; ++v) {
    double lo = values[fair.space.cell(0, v)];
    double hi = lo;
    for (std::size_t a = 1; a < na; ++a) {
      const double e = values[fair.space.cell(a, v)];
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

double fairness_gap(const RiskProfile& profile, const FairSubspace& fair) {
  check_same_space(profile.space, fair.space, "fairness_gap");
  return fairness_gap(std::span<const double>(profile.values), fair);
}

}  // namespace frm

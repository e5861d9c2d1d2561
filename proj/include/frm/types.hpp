#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "frm/errors.hpp"

namespace frm {

enum class FairKind { RiskParity, ConditionalRiskParity };

// Ordered vocabularies for the sensitive attribute A and the discriminative
// attribute V. Profiles and marginals are flat arrays indexed
// [group][disc_value] in this ordering (group-major). For risk parity V is
// trivial: a singleton disc_values list.
struct GroupSpace {
  std::vector<std::string> groups;
  std::vector<std::string> disc_values;

  GroupSpace() = default;
  GroupSpace(std::vector<std::string> g, std::vector<std::string> v);

  std::size_t num_groups() const { return groups.size(); }
  std::size_t num_disc() const { return disc_values.size(); }
  std::size_t num_cells() const { return groups.size() * disc_values.size(); }
  std::size_t cell(std::size_t a, std::size_t v) const { return a * disc_values.size() + v; }

  bool operator==(const GroupSpace&) const = default;
};

// Conditional expected loss per (group, disc_value) cell.
struct RiskProfile {
  GroupSpace space;
  std::vector<double> values;

  RiskProfile() = default;
  RiskProfile(GroupSpace s, std::vector<double> vals);

  double at(std::size_t a, std::size_t v) const { return values[space.cell(a, v)]; }
  double& at(std::size_t a, std::size_t v) { return values[space.cell(a, v)]; }
};

// Joint probability of (A, V): entries >= 0, total mass 1 (within 1e-12).
struct GroupMarginal {
  GroupSpace space;
  std::vector<double> probs;

  GroupMarginal() = default;
  GroupMarginal(GroupSpace s, std::vector<double> p);

  double at(std::size_t a, std::size_t v) const { return probs[space.cell(a, v)]; }
};

// A linear subspace of profile space: constant arrays (risk parity) or arrays
// constant across groups within each disc_value column (conditional risk
// parity).
struct FairSubspace {
  GroupSpace space;
  FairKind kind = FairKind::RiskParity;

  FairSubspace() = default;
  FairSubspace(GroupSpace s, FairKind k) : space(std::move(s)), kind(k) {}
};

void check_same_space(const GroupSpace& a, const GroupSpace& b, const char* what);

// <marginal, profile>: the overall expected loss under that marginal.
double overall_risk(const GroupMarginal& marginal, const RiskProfile& profile);

// Orthogonal projection onto the fair subspace. For CRP each column is
// replaced by its across-group mean; for RP the global mean is replicated.
std::vector<double> project_fair(std::span<const double> x, const FairSubspace& fair);
RiskProfile project_fair(const RiskProfile& x, const FairSubspace& fair);

// x - project_fair(x): the component in the orthogonal complement.
std::vector<double> project_fair_perp(std::span<const double> x, const FairSubspace& fair);
RiskProfile project_fair_perp(const RiskProfile& x, const FairSubspace& fair);

// Worst across-group spread: max over columns of (max_a - min_a) for CRP,
// global max - min for RP. Zero exactly when the profile lies in the
// subspace.
double fairness_gap(const RiskProfile& profile, const FairSubspace& fair);
double fairness_gap(std::span<const double> values, const FairSubspace& fair);

}  // namespace frm

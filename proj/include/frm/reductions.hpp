#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frm/dataset.hpp"
#include "frm/logistic.hpp"
#include "frm/types.hpp"

namespace frm {

// Mixture of linear classifiers; risk profiles of mixtures are the
// mix-weighted combinations of member profiles.
struct RandomizedClassifier {
  std::vector<LinearClassifier> members;
  std::vector<double> mix_weights;

  void validate() const;
  // Expected 0-1 loss of the mixture on one row.
  double expected_error(const double* x, int y01) const;
};

// Parity constraint enforced during training: risk parity moments, or
// equalized-odds style moments (V = Y) for conditional risk parity.
// `epsilon` is the permitted violation per signed moment.
struct ConstraintSpec {
  FairKind kind = FairKind::ConditionalRiskParity;
  double epsilon = 0.1;
};

enum class IterateSelection { UniformAverage, BestRound };

struct SolverConfig {
  int iterations = 25;
  double multiplier_bound = 3.0;    // L1 cap on the Lagrange multipliers
  double eta0 = 0.35;               // step size eta0 / sqrt(t)
  LogisticConfig base;
  IterateSelection selection = IterateSelection::UniformAverage;
  std::uint64_t seed = 0;  // recorded for provenance; the loop is deterministic
};

// Exponentiated-gradient reductions: each round trains a cost-sensitive
// weighted logistic best response to the current multipliers, then updates
// the multipliers with the observed constraint violations. Returns the
// mixture over rounds (or the best single round).
RandomizedClassifier train_constrained(const LabeledDataset& data, const ConstraintSpec& constraint,
                                       const SolverConfig& config);

struct Evaluation {
  double accuracy = 0.0;
  RiskProfile profile;  // expected 0-1 loss per cell
  double gap = 0.0;
};

// Deterministic evaluation via the mixture's expected 0-1 loss. The fairness
// kind is implied by the space: trivial V means risk parity.
Evaluation evaluate(const RandomizedClassifier& model, const LabeledDataset& data,
                    const GroupSpace& space);

// Flat text serialization: member count and dimension, then one line per
// member with weights, bias and mixing weight.
void save_model(const RandomizedClassifier& model, const std::string& path);
RandomizedClassifier load_model(const std::string& path);

}  // namespace frm

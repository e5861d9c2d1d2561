#pragma once

#include <cstddef>
#include <vector>

#include "frm/dataset.hpp"

namespace frm {

// Affine scorer over feature vectors; class 1 when the score is positive.
struct LinearClassifier {
  std::vector<double> weights;
  double bias = 0.0;

  double score(const double* x) const {
    double s = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * x[j];
    return s;
  }
  int predict(const double* x) const { return score(x) > 0.0 ? 1 : 0; }
  double prob(const double* x) const;  // logistic link
};

struct LogisticConfig {
  int max_newton_steps = 100;
  double l2 = 1e-6;        // ridge on weights (not bias)
  double grad_tol = 1e-8;  // on the gradient norm
};

struct LogisticFit {
  LinearClassifier model;
  bool degenerate_constant = false;  // all effective rows share one label
  int steps = 0;
  double grad_norm = 0.0;
};

// Newton minimization of total-weight-normalized log-loss plus L2. Targets
// are 0/1 labels; rows with zero weight are ignored. Deterministic.
LogisticFit fit_logistic_raw(std::size_t n, std::size_t dim, const double* features,
                             const std::vector<int>& y01, const std::vector<double>& row_weights,
                             const LogisticConfig& config = {});

// Same, reading labels from the dataset (which must be binary).
LogisticFit weighted_logistic_fit(const LabeledDataset& data,
                                  const std::vector<double>& row_weights,
                                  const LogisticConfig& config = {});

}  // namespace frm

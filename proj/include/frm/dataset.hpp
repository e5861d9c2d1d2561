#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "frm/types.hpp"

namespace frm {

// Rows of (features, group, label). Group and label columns hold indices
// into the corresponding vocabulary.
struct LabeledDataset {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> features;  // row-major, n * dim
  std::vector<int> group;        // n, index into group_names
  std::vector<int> label;        // n, index into label_names
  std::vector<std::string> group_names;
  std::vector<std::string> label_names;

  const double* row(std::size_t i) const { return features.data() + i * dim; }
  void validate() const;

  // Row subset in the given order; vocabularies are kept as-is.
  LabeledDataset select(const std::vector<std::size_t>& rows) const;
};

// The space a dataset induces for a fairness kind: groups from the dataset
// vocabulary; V trivial for risk parity, V = Y for conditional risk parity.
GroupSpace space_for(const LabeledDataset& data, FairKind kind);

enum class CellPolicy { Strict, Lenient };

struct EmpiricalProfile {
  RiskProfile profile;
  std::vector<std::size_t> cell_counts;  // rows per cell
  std::vector<bool> filled;              // false where a cell had no rows (lenient only)
};

// Per-cell means of a per-row loss vector. Rows are mapped to cells by group
// name and, when |V| > 1, by label name (V = Y). Strict mode rejects empty
// cells; lenient mode zeroes them and clears the mask bit.
EmpiricalProfile empirical_risk_profile(const std::vector<double>& row_losses,
                                        const LabeledDataset& data, const GroupSpace& space,
                                        CellPolicy policy = CellPolicy::Strict);

// The empirical joint of (A, V) on the dataset (V = Y when |V| > 1).
GroupMarginal empirical_marginal(const LabeledDataset& data, const GroupSpace& space);

}  // namespace frm

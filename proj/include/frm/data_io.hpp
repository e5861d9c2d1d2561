#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "frm/dataset.hpp"
#include "frm/geometry.hpp"
#include "frm/types.hpp"

namespace frm {

// Per-cell Gaussian: mean vector (length d) and SPD covariance (row-major
// d x d).
struct GaussianCell {
  std::vector<double> mean;
  std::vector<double> cov;
};

// Synthetic generator: cell counts follow the joint over (A, Y), features
// are Gaussian per cell.
struct GaussianSpec {
  GroupSpace space;  // groups x labels
  std::vector<GaussianCell> cells;
  GroupMarginal joint;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  std::size_t dim() const { return cells.empty() ? 0 : cells.front().mean.size(); }
};

LabeledDataset gaussian_sample(const GaussianSpec& spec);

// The stock two-group / two-label 2-d geometry used by the simulation
// harness: classes separated along the first axis, the second group shifted
// along both axes so a boundary fit to the first group alone sacrifices the
// (group 1, label 0) cell.
GaussianSpec default_simulation_spec(const GroupMarginal& joint, std::size_t n,
                                     std::uint64_t seed);

// The simulation joints: uniform target, and the biased training joint with
// per-cell group-1 mass p_minor (label marginals stay 0.5/0.5).
GroupMarginal simulation_joint_pstar();
GroupMarginal simulation_joint_ptilde(double p_minor);

struct FeatureColumn {
  std::string name;
  bool categorical = false;
};

struct TabularSchema {
  std::vector<FeatureColumn> features;
  std::vector<std::string> protected_columns;  // crossed into the group label
  std::string label_column;
  std::string positive_label;
};

// Fitted encoding: feature expansion (one-hot levels) plus vocabularies,
// reusable so a second file is encoded identically.
struct TabularEncoding {
  std::vector<std::string> feature_names;
  std::vector<bool> standardizable;  // true for numeric source columns
  std::vector<std::vector<std::string>> categorical_levels;
  std::vector<std::string> group_names;
  std::vector<std::string> label_names;  // negative value first, positive second
};

struct TabularLoad {
  LabeledDataset data;
  TabularEncoding encoding;
  std::size_t dropped_rows = 0;  // rows removed for unparseable/missing cells
};

TabularLoad load_csv(const std::string& path, const TabularSchema& schema);
TabularLoad load_csv(const std::string& path, const TabularSchema& schema,
                     const TabularEncoding& encoding);

// Column-wise mean/sd fitted once (on training data) and applied to any
// split; non-standardizable columns pass through.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const LabeledDataset& data, const std::vector<bool>& standardizable);
  void apply(LabeledDataset& data) const;
};

struct TrainTest {
  LabeledDataset train;
  LabeledDataset test;
};

// Stratified by (group, label): each cell contributes proportionally, with
// largest-remainder rounding to hit round(ratio * n) exactly.
TrainTest split_train_test(const LabeledDataset& data, double ratio, std::uint64_t seed);

// Subsample preserving the label marginals while equalizing group mass
// within each label, at the largest size feasible without replacement.
LabeledDataset make_pstar_testset(const LabeledDataset& test, std::uint64_t seed);

// Dataset CSV: feature columns, then group and label names.
void save_dataset_csv(const LabeledDataset& data, const std::string& path);
LabeledDataset load_dataset_csv(const std::string& path);

// Profile / marginal matrix CSV: header of disc values, leading group column.
void save_matrix_csv(const GroupSpace& space, std::span<const double> values,
                     const std::string& path);
std::pair<GroupSpace, std::vector<double>> load_matrix_csv(const std::string& path);
RiskProfile load_profile_csv(const std::string& path);
GroupMarginal load_marginal_csv(const std::string& path);

// Polytope CSV: one vertex per row, cells named "group|disc".
void save_polytope_csv(const RiskPolytope& poly, const std::string& path);
RiskPolytope load_polytope_csv(const std::string& path);

}  // namespace frm

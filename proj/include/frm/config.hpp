#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frm/types.hpp"

namespace frm {

// How the biased training set is produced: sampled straight from the biased
// joint, thinned from unbiased samples by the under-representation filter
// (swept over the retention probability beta), or stratified-resampled from
// unbiased samples to the biased marginal.
enum class TrainBias { Joint, UnderRepresentation, Resample };

struct SimulateConfig {
  std::vector<double> p_minor = {0.01, 0.05, 0.1, 0.25};
  int reps = 20;
  std::size_t n_train = 2000;
  std::size_t n_test = 2000;
  int iterations = 25;
  double eps_baseline = 10.0;
  double eps_fair = 0.1;
  TrainBias bias = TrainBias::Joint;
  std::string bias_group = "1";
  std::string bias_label = "1";
  std::vector<double> beta = {0.25, 0.5, 1.0};  // sweep grid when bias = underrepresentation
};

struct GeometryConfig {
  std::string fixture_dir = "fixtures";
  int sweep_points = 101;
};

struct TabularConfig {
  std::string data_path;
  std::string label_column;
  std::string positive_label;
  std::vector<std::string> protected_columns;
  std::vector<std::string> numeric_features;
  std::vector<std::string> categorical_features;
  int reps = 20;
  int iterations = 50;
  double eps_baseline = 10.0;
  double eps_fair = 0.1;  // 0.02 is the usual choice for income-style data
  double train_ratio = 0.7;
};

struct AuditConfig {
  std::string vertices_path;
  std::string p_star_path;
  std::string p_tilde_path;
  FairKind fair = FairKind::ConditionalRiskParity;
};

enum class Mode { Simulate, Geometry, Tabular, Audit };

// Parsed from a key = value file with [section] blocks, one section per
// mode. Unknown keys and sections are rejected.
struct ExperimentConfig {
  Mode mode = Mode::Simulate;
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  int workers = 1;

  SimulateConfig simulate;
  GeometryConfig geometry;
  TabularConfig tabular;
  AuditConfig audit;

  static ExperimentConfig parse_file(const std::string& path);
  static ExperimentConfig parse_text(const std::string& text, const std::string& origin);
};

}  // namespace frm

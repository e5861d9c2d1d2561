#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "frm/config.hpp"
#include "frm/geometry.hpp"
#include "frm/types.hpp"

namespace frm {

// One result line; the CSV columns follow this field order. `parameter` is
// the swept value (p_minor for simulate, 0 when nothing is swept).
struct ResultRow {
  std::string mode;
  int repetition = 0;
  double parameter = 0.0;
  std::string model;  // "fair" or "baseline"
  double accuracy_on_pstar = 0.0;
  double accuracy_on_ptilde = 0.0;
  double fairness_gap = 0.0;
  double wall_time = 0.0;
};

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path);

struct ModelMetrics {
  double accuracy_on_pstar = 0.0;
  double accuracy_on_ptilde = 0.0;
  double train_gap = 0.0;  // parity gap of the 0-1 profile on the training set
  double wall_time = 0.0;
};

struct SimulationCell {
  ModelMetrics baseline;
  ModelMetrics fair;
};

// One (p_minor, repetition) cell of the simulation sweep: sample biased
// training data, train both models, evaluate on unbiased and biased test
// sets.
SimulationCell run_simulation_cell(const SimulateConfig& cfg, double p_minor,
                                   std::uint64_t cell_seed);

struct CounterexampleReport {
  bool bayes_fair = false;        // unbiased argmin lies in the fair subspace
  double risk_unconstrained = 0;  // <p*, argmin under p~>
  double risk_fair = 0;           // <p*, fair argmin under p~>
  RiskProfile r_tilde;
  RiskProfile r_tilde_fair;
  bool harms() const { return risk_unconstrained < risk_fair; }
};

CounterexampleReport evaluate_counterexample(const RiskPolytope& poly,
                                             const GroupMarginal& p_star,
                                             const GroupMarginal& p_tilde,
                                             const FairSubspace& fair);

// Mode drivers. Each writes its outputs under cfg.out_dir and logs a short
// human-readable summary. Errors surface as exceptions (ConfigError,
// DataError, CheckFailure).
void run_simulate(const ExperimentConfig& cfg, std::ostream& log);
void run_geometry(const ExperimentConfig& cfg, std::ostream& log);
void run_tabular(const ExperimentConfig& cfg, std::ostream& log);
void run_audit(const ExperimentConfig& cfg, std::ostream& log);

void run(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace frm

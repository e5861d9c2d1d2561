#include "frm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "frm/bias.hpp"
#include "frm/data_io.hpp"
#include "frm/reductions.hpp"
#include "frm/rng.hpp"

namespace frm {

namespace {

namespace fs = std::filesystem;

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + dir + "': " + ec.message());
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

MeanSd summarize(const std::vector<double>& xs) {
  MeanSd s;
  s.n = xs.size();
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double acc = 0.0;
    for (double x : xs) acc += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(acc / static_cast<double>(xs.size() - 1));
  }
  return s;
}

ModelMetrics train_and_eval(const LabeledDataset& train, const LabeledDataset& test_pstar,
                            const LabeledDataset& test_ptilde, const GroupSpace& space,
                            double epsilon, int iterations) {
  const double t0 = now_seconds();
  ConstraintSpec constraint{FairKind::ConditionalRiskParity, epsilon};
  SolverConfig solver;
  solver.iterations = iterations;
  const RandomizedClassifier model = train_constrained(train, constraint, solver);
  ModelMetrics m;
  m.accuracy_on_pstar = evaluate(model, test_pstar, space).accuracy;
  m.accuracy_on_ptilde = evaluate(model, test_ptilde, space).accuracy;
  m.train_gap = evaluate(model, train, space).gap;
  m.wall_time = now_seconds() - t0;
  return m;
}

// Lexicographically smallest argmin vertex, the designated representative
// under ties.
const RiskProfile& argmin_vertex(const RiskPolytope& poly, const GroupMarginal& cost) {
  const LinearMin m = minimize_linear(poly, cost);
  std::size_t best = m.argmin[0];
  for (std::size_t i : m.argmin) {
    if (std::lexicographical_compare(poly.vertices[i].values.begin(),
                                     poly.vertices[i].values.end(),
                                     poly.vertices[best].values.begin(),
                                     poly.vertices[best].values.end()))
      best = i;
  }
  return poly.vertices[best];
}

}  // namespace

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open results file " + path);
  out << "mode,repetition,parameter,model,accuracy_on_pstar,accuracy_on_ptilde,fairness_gap,"
         "wall_time\n";
  for (const auto& r : rows) {
    out << r.mode << "," << r.repetition << "," << fmt_double(r.parameter) << "," << r.model << ","
        << fmt_double(r.accuracy_on_pstar) << "," << fmt_double(r.accuracy_on_ptilde) << ","
        << fmt_double(r.fairness_gap) << "," << fmt_double(r.wall_time) << "\n";
  }
  if (!out) throw DataError("write failed on " + path);
}

namespace {

// Draws a biased dataset of roughly n rows according to the configured bias
// kind. `parameter` is p_minor for joint/resample bias and the retention
// probability beta for the under-representation filter.
LabeledDataset sample_biased(const SimulateConfig& cfg, double parameter, std::size_t n,
                             std::uint64_t seed) {
  switch (cfg.bias) {
    case TrainBias::Joint:
      return gaussian_sample(
          default_simulation_spec(simulation_joint_ptilde(parameter), n, seed));
    case TrainBias::Resample: {
      const LabeledDataset pool = gaussian_sample(
          default_simulation_spec(simulation_joint_pstar(), 2 * n, derive_seed(seed, {11})));
      return reweight_to_marginal(pool, simulation_joint_ptilde(parameter), n,
                                  derive_seed(seed, {12}))
          .data;
    }
    case TrainBias::UnderRepresentation: {
      // The filter keeps a (1 - (1-beta)/4) fraction of a uniform source;
      // oversample so the surviving set lands near n.
      const double keep = 1.0 - (1.0 - parameter) * 0.25;
      const auto n_pre = static_cast<std::size_t>(std::llround(static_cast<double>(n) / keep));
      const LabeledDataset pool = gaussian_sample(
          default_simulation_spec(simulation_joint_pstar(), n_pre, derive_seed(seed, {13})));
      UnderRepresentationSpec spec{cfg.bias_group, cfg.bias_label, parameter,
                                   derive_seed(seed, {14})};
      return underrepresentation_filter(pool, spec);
    }
  }
  throw ConfigError("unknown bias kind");
}

}  // namespace

SimulationCell run_simulation_cell(const SimulateConfig& cfg, double parameter,
                                   std::uint64_t cell_seed) {
  const GroupMarginal p_star = simulation_joint_pstar();

  const LabeledDataset train = sample_biased(cfg, parameter, cfg.n_train, derive_seed(cell_seed, {1}));
  const LabeledDataset test_pstar =
      gaussian_sample(default_simulation_spec(p_star, cfg.n_test, derive_seed(cell_seed, {2})));
  const LabeledDataset test_ptilde =
      sample_biased(cfg, parameter, cfg.n_test, derive_seed(cell_seed, {3}));
  const GroupSpace space = space_for(train, FairKind::ConditionalRiskParity);

  SimulationCell cell;
  cell.baseline =
      train_and_eval(train, test_pstar, test_ptilde, space, cfg.eps_baseline, cfg.iterations);
  cell.fair = train_and_eval(train, test_pstar, test_ptilde, space, cfg.eps_fair, cfg.iterations);
  return cell;
}

void run_simulate(const ExperimentConfig& cfg, std::ostream& log) {
  ensure_out_dir(cfg.out_dir);
  const SimulateConfig& sim = cfg.simulate;
  const std::vector<double>& grid =
      sim.bias == TrainBias::UnderRepresentation ? sim.beta : sim.p_minor;
  const std::size_t n_cells = grid.size() * static_cast<std::size_t>(sim.reps);
  std::vector<SimulationCell> cells(n_cells);

  // Cells run in parallel; per-cell seeds depend only on (grid index, rep).
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= n_cells) return;
      const std::size_t pi = k / static_cast<std::size_t>(sim.reps);
      const std::size_t rep = k % static_cast<std::size_t>(sim.reps);
      cells[k] = run_simulation_cell(sim, grid[pi], derive_seed(cfg.seed, {pi, rep}));
    }
  };
  const int n_threads = std::max(1, std::min<int>(cfg.workers, static_cast<int>(n_cells)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<ResultRow> rows;
  rows.reserve(2 * n_cells);
  for (std::size_t pi = 0; pi < grid.size(); ++pi) {
    for (int rep = 0; rep < sim.reps; ++rep) {
      const SimulationCell& c = cells[pi * static_cast<std::size_t>(sim.reps) +
                                      static_cast<std::size_t>(rep)];
      for (const auto* kind : {"baseline", "fair"}) {
        const ModelMetrics& m = std::string(kind) == "fair" ? c.fair : c.baseline;
        rows.push_back(ResultRow{"simulate", rep, grid[pi], kind, m.accuracy_on_pstar,
                                 m.accuracy_on_ptilde, m.train_gap, m.wall_time});
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.parameter != b.parameter) return a.parameter < b.parameter;
    if (a.repetition != b.repetition) return a.repetition < b.repetition;
    return a.model < b.model;
  });
  write_results_csv(rows, cfg.out_dir + "/simulate_results.csv");

  std::ofstream sum(cfg.out_dir + "/simulate_summary.csv");
  if (!sum) throw DataError("cannot open simulate_summary.csv");
  sum << "parameter,model,reps,acc_pstar_mean,acc_pstar_sd,acc_ptilde_mean,acc_ptilde_sd,"
         "gap_mean,gap_sd\n";
  for (double p : grid) {
    for (const auto* kind : {"baseline", "fair"}) {
      std::vector<double> a_star, a_tilde, gaps;
      for (const auto& r : rows) {
        if (r.parameter == p && r.model == kind) {
          a_star.push_back(r.accuracy_on_pstar);
          a_tilde.push_back(r.accuracy_on_ptilde);
          gaps.push_back(r.fairness_gap);
        }
      }
      const MeanSd s1 = summarize(a_star), s2 = summarize(a_tilde), s3 = summarize(gaps);
      sum << fmt_double(p) << "," << kind << "," << s1.n << "," << fmt_double(s1.mean) << ","
          << fmt_double(s1.sd) << "," << fmt_double(s2.mean) << "," << fmt_double(s2.sd) << ","
          << fmt_double(s3.mean) << "," << fmt_double(s3.sd) << "\n";
      log << "simulate parameter=" << p << " " << kind << ": acc(P*)=" << s1.mean
          << " +- " << s1.sd << ", acc(P~)=" << s2.mean << " +- " << s2.sd << "\n";
    }
  }
}

CounterexampleReport evaluate_counterexample(const RiskPolytope& poly,
                                             const GroupMarginal& p_star,
                                             const GroupMarginal& p_tilde,
                                             const FairSubspace& fair) {
  CounterexampleReport rep;
  rep.bayes_fair = bayes_fair_check(poly, p_star, fair);
  rep.r_tilde = argmin_vertex(poly, p_tilde);
  rep.r_tilde_fair = minimize_linear_fair(poly, p_tilde, fair).profile;
  rep.risk_unconstrained = overall_risk(p_star, rep.r_tilde);
  rep.risk_fair = overall_risk(p_star, rep.r_tilde_fair);
  return rep;
}

void run_geometry(const ExperimentConfig& cfg, std::ostream& log) {
  ensure_out_dir(cfg.out_dir);
  const std::string dir = cfg.geometry.fixture_dir;

  // Counterexample fixture: unbiased argmin fair, yet the fair minimizer
  // under the biased marginal does worse on the target domain.
  {
    const RiskPolytope poly = load_polytope_csv(dir + "/counterexample/vertices.csv");
    const GroupMarginal p_star = load_marginal_csv(dir + "/counterexample/p_star.csv");
    const GroupMarginal p_tilde = load_marginal_csv(dir + "/counterexample/p_tilde.csv");
    const FairSubspace fair(poly.space, FairKind::ConditionalRiskParity);
    const CounterexampleReport rep = evaluate_counterexample(poly, p_star, p_tilde, fair);
    if (!rep.bayes_fair)
      throw CheckFailure("counterexample fixture: unbiased argmin is not fair");
    if (!(rep.risk_unconstrained < rep.risk_fair - poly.tie_tol()))
      throw CheckFailure("counterexample fixture: fairness does not strictly harm target risk");
    log << "counterexample: <P*,R~> = " << rep.risk_unconstrained
        << " < <P*,R~_F> = " << rep.risk_fair << " (harm confirmed, argmin under P* fair)\n";
  }

  // Risk-parity threshold sweep on the shipped two-group instance.
  {
    const RiskPolytope poly = load_polytope_csv(dir + "/rp_instance/vertices.csv");
    const GroupMarginal p_tilde = load_marginal_csv(dir + "/rp_instance/p_tilde.csv");
    const FairSubspace fair(poly.space, FairKind::RiskParity);
    const RiskProfile r_tilde = argmin_vertex(poly, p_tilde);
    const RiskProfile r_fair = minimize_linear_fair(poly, p_tilde, fair).profile;
    const std::size_t majority = p_tilde.probs[0] >= p_tilde.probs[1] ? 0 : 1;
    const RpThreshold th = rp_threshold(r_tilde, r_fair, majority);

    std::ofstream sweep(cfg.out_dir + "/rp_sweep.csv");
    if (!sweep) throw DataError("cannot open rp_sweep.csv");
    sweep << "p_majority,risk_unconstrained,risk_fair,delta,verdict\n";
    double prev_delta = 0.0;
    double crossing = -1.0;
    const int n = cfg.geometry.sweep_points;
    for (int k = 0; k < n; ++k) {
      const double p = static_cast<double>(k) / static_cast<double>(n - 1);
      std::vector<double> probs(2);
      probs[majority] = p;
      probs[1 - majority] = 1.0 - p;
      const GroupMarginal target(poly.space, probs);
      const double ru = overall_risk(target, r_tilde);
      const double rf = overall_risk(target, r_fair);
      const double delta = ru - rf;
      sweep << fmt_double(p) << "," << fmt_double(ru) << "," << fmt_double(rf) << ","
            << fmt_double(delta) << "," << (delta <= 0.0 ? "harm" : "help") << "\n";
      if (k > 0 && ((prev_delta > 0.0) != (delta > 0.0)) && crossing < 0.0) {
        // Linear interpolation of the sign change.
        crossing = (static_cast<double>(k - 1) + prev_delta / (prev_delta - delta)) /
                   static_cast<double>(n - 1);
      }
      prev_delta = delta;
    }

    if (th.defined) {
      log << "rp threshold = " << th.threshold << " (harm when p_majority "
          << (th.harm_above ? ">=" : "<=") << " threshold)\n";
      if (crossing >= 0.0) {
        log << "sweep crossing at p = " << crossing << "\n";
        if (std::abs(crossing - th.threshold) > 2.0 / static_cast<double>(n - 1))
          throw CheckFailure("rp sweep crossing disagrees with the threshold formula");
      } else if (th.threshold > 0.0 && th.threshold < 1.0) {
        throw CheckFailure("rp sweep found no crossing though the threshold lies inside (0,1)");
      }
    } else {
      log << "rp threshold undefined (unconstrained optimum already fair); no crossing expected\n";
      if (crossing >= 0.0) throw CheckFailure("rp sweep crossed despite undefined threshold");
    }
  }
  log << "geometry checks passed\n";
}

void run_tabular(const ExperimentConfig& cfg, std::ostream& log) {
  ensure_out_dir(cfg.out_dir);
  const TabularConfig& tab = cfg.tabular;
  if (!fs::exists(tab.data_path))
    throw DataError("tabular: dataset file '" + tab.data_path +
                    "' not found. Public tabular datasets are not bundled; download the CSV "
                    "and point [tabular] data at it (see README).");

  TabularSchema schema;
  for (const auto& f : tab.numeric_features) schema.features.push_back({f, false});
  for (const auto& f : tab.categorical_features) schema.features.push_back({f, true});
  schema.protected_columns = tab.protected_columns;
  schema.label_column = tab.label_column;
  schema.positive_label = tab.positive_label;

  const TabularLoad loaded = load_csv(tab.data_path, schema);
  log << "tabular: " << loaded.data.n << " rows, " << loaded.data.dim << " features, "
      << loaded.data.group_names.size() << " protected groups (" << loaded.dropped_rows
      << " rows dropped)\n";

  std::vector<ResultRow> rows(static_cast<std::size_t>(tab.reps) * 2);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= static_cast<std::size_t>(tab.reps)) return;
      const std::uint64_t rep_seed = derive_seed(cfg.seed, {0x7ab, k});
      TrainTest split = split_train_test(loaded.data, tab.train_ratio, rep_seed);
      const Standardizer std_fit = Standardizer::fit(split.train, loaded.encoding.standardizable);
      std_fit.apply(split.train);
      std_fit.apply(split.test);
      const LabeledDataset pstar_test = make_pstar_testset(split.test, derive_seed(rep_seed, {7}));
      const GroupSpace space = space_for(split.train, FairKind::ConditionalRiskParity);

      const ModelMetrics base = train_and_eval(split.train, pstar_test, split.test, space,
                                               tab.eps_baseline, tab.iterations);
      const ModelMetrics fair = train_and_eval(split.train, pstar_test, split.test, space,
                                               tab.eps_fair, tab.iterations);
      rows[2 * k] = ResultRow{"tabular", static_cast<int>(k), 0.0, "baseline",
                              base.accuracy_on_pstar, base.accuracy_on_ptilde, base.train_gap,
                              base.wall_time};
      rows[2 * k + 1] = ResultRow{"tabular", static_cast<int>(k), 0.0, "fair",
                                  fair.accuracy_on_pstar, fair.accuracy_on_ptilde, fair.train_gap,
                                  fair.wall_time};
    }
  };
  const int n_threads = std::max(1, std::min<int>(cfg.workers, tab.reps));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.repetition != b.repetition) return a.repetition < b.repetition;
    return a.model < b.model;
  });
  write_results_csv(rows, cfg.out_dir + "/tabular_results.csv");

  std::ofstream sum(cfg.out_dir + "/tabular_summary.csv");
  if (!sum) throw DataError("cannot open tabular_summary.csv");
  sum << "model,reps,acc_pstar_mean,acc_pstar_sd,acc_ptilde_mean,acc_ptilde_sd\n";
  for (const auto* kind : {"fair", "baseline"}) {
    std::vector<double> a_star, a_tilde;
    for (const auto& r : rows) {
      if (r.model == kind) {
        a_star.push_back(r.accuracy_on_pstar);
        a_tilde.push_back(r.accuracy_on_ptilde);
      }
    }
    const MeanSd s1 = summarize(a_star), s2 = summarize(a_tilde);
    sum << kind << "," << s1.n << "," << fmt_double(s1.mean) << "," << fmt_double(s1.sd) << ","
        << fmt_double(s2.mean) << "," << fmt_double(s2.sd) << "\n";
    log << "tabular " << kind << ": acc(P*) = " << s1.mean << " +- " << s1.sd
        << ", acc(P~) = " << s2.mean << " +- " << s2.sd << "\n";
  }
}

void run_audit(const ExperimentConfig& cfg, std::ostream& log) {
  ensure_out_dir(cfg.out_dir);
  const AuditConfig& a = cfg.audit;
  const RiskPolytope poly = load_polytope_csv(a.vertices_path);
  const GroupMarginal p_star = load_marginal_csv(a.p_star_path);
  const GroupMarginal p_tilde = load_marginal_csv(a.p_tilde_path);
  const FairSubspace fair(poly.space, a.fair);

  nlohmann::json report;
  report["fair_kind"] = a.fair == FairKind::RiskParity ? "rp" : "crp";

  const BiasDecomposition dec = decompose_bias(p_star, p_tilde, fair);
  auto norm2 = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    return std::sqrt(s);
  };
  report["bias_decomposition"] = {{"orthogonal_norm", norm2(dec.orthogonal)},
                                  {"residual_norm", norm2(dec.residual)}};
  const bool orthogonal = orthogonality_check(p_star, p_tilde, fair);
  report["orthogonal_bias"] = orthogonal;  // the sufficient-condition path

  const bool fair_bayes = bayes_fair_check(poly, p_star, fair);
  report["bayes_fair"] = fair_bayes;
  if (fair_bayes) {
    const RecoveryVerdict v = recovery_condition(poly, p_star, p_tilde, fair);
    report["recovery"] = {{"recoverable", v.recoverable},
                          {"violation", v.certificate.violation},
                          {"r_star", v.r_star.values},
                          {"fair_optimum_under_bias", v.fair_optimum_under_bias.values},
                          {"fair_perp_witness", v.certificate.fair_perp_witness}};
    if (!v.recoverable)
      report["recovery"]["violated_vertex"] = static_cast<int>(v.certificate.violated_vertex);
  } else {
    report["recovery"] = {
        {"skipped", "unconstrained minimizer under p_star is not fair (assumption violated)"}};
  }

  if (a.fair == FairKind::RiskParity && poly.space.num_cells() == 2) {
    const RiskProfile r_tilde = argmin_vertex(poly, p_tilde);
    const RiskProfile r_fair = minimize_linear_fair(poly, p_tilde, fair).profile;
    const std::size_t majority = p_tilde.probs[0] >= p_tilde.probs[1] ? 0 : 1;
    const RpThreshold th = rp_threshold(r_tilde, r_fair, majority);
    report["rp_threshold"] = {{"defined", th.defined}, {"majority_index", majority}};
    if (th.defined) {
      report["rp_threshold"]["threshold"] = th.threshold;
      report["rp_threshold"]["harm_when"] = th.harm_above ? ">=" : "<=";
    }
  }

  const std::string text = report.dump(2);
  std::ofstream out(cfg.out_dir + "/audit_report.json");
  if (!out) throw DataError("cannot open audit_report.json");
  out << text << "\n";
  log << text << "\n";
}

void run(const ExperimentConfig& cfg, std::ostream& log) {
  switch (cfg.mode) {
    case Mode::Simulate: run_simulate(cfg, log); break;
    case Mode::Geometry: run_geometry(cfg, log); break;
    case Mode::Tabular: run_tabular(cfg, log); break;
    case Mode::Audit: run_audit(cfg, log); break;
  }
}

}  // namespace frm

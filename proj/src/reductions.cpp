#include "frm/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace frm {

void RandomizedClassifier::validate() const {
  if (members.empty() || members.size() != mix_weights.size())
    throw ShapeError("RandomizedClassifier: member/weight mismatch");
  double total = 0.0;
  for (double w : mix_weights) {
    if (w < 0.0 || !std::isfinite(w)) throw ShapeError("RandomizedClassifier: bad mixing weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ShapeError("RandomizedClassifier: mixing weights sum to " + std::to_string(total));
}

double RandomizedClassifier::expected_error(const double* x, int y01) const {
  double err = 0.0;
  for (std::size_t m = 0; m < members.size(); ++m) {
    if (members[m].predict(x) != y01) err += mix_weights[m];
  }
  return err;
}

namespace {

// One signed pair of moment constraints: <u, errors> - eps <= 0 and
// -<u, errors> - eps <= 0, where u contrasts a cell mean against its
// reference mean.
struct MomentRow {
  std::vector<double> u;
};

std::vector<MomentRow> build_moments(const LabeledDataset& data, FairKind kind) {
  const std::size_t n = data.n;
  const std::size_t na = data.group_names.size();
  const std::size_t ny = data.label_names.size();

  std::vector<MomentRow> rows;
  if (kind == FairKind::RiskParity) {
    std::vector<std::size_t> n_a(na, 0);
    for (int g : data.group) n_a[static_cast<std::size_t>(g)]++;
    for (std::size_t a = 0; a < na; ++a) {
      if (n_a[a] == 0) throw DataError("train_constrained: group '" + data.group_names[a] + "' has no rows");
      MomentRow row;
      row.u.assign(n, -1.0 / static_cast<double>(n));
      for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<std::size_t>(data.group[i]) == a) row.u[i] += 1.0 / static_cast<double>(n_a[a]);
      }
      rows.push_back(std::move(row));
    }
    return rows;
  }

  std::vector<std::size_t> n_ay(na * ny, 0), n_y(ny, 0);
  for (std::size_t i = 0; i < n; ++i) {
    n_ay[static_cast<std::size_t>(data.group[i]) * ny + static_cast<std::size_t>(data.label[i])]++;
    n_y[static_cast<std::size_t>(data.label[i])]++;
  }
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t y = 0; y < ny; ++y) {
      if (n_ay[a * ny + y] == 0)
        throw DataError("train_constrained: empty cell (group='" + data.group_names[a] +
                        "', label='" + data.label_names[y] + "')");
      MomentRow row;
      row.u.assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<std::size_t>(data.label[i]) != y) continue;
        row.u[i] -= 1.0 / static_cast<double>(n_y[y]);
        if (static_cast<std::size_t>(data.group[i]) == a)
          row.u[i] += 1.0 / static_cast<double>(n_ay[a * ny + y]);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace

RandomizedClassifier train_constrained(const LabeledDataset& data, const ConstraintSpec& constraint,
                                       const SolverConfig& config) {
  data.validate();
  if (data.n == 0) throw DataError("train_constrained: empty dataset");
  if (data.label_names.size() != 2) throw DataError("train_constrained: needs binary labels");
  if (!(constraint.epsilon >= 0.0)) throw ConfigError("train_constrained: epsilon must be >= 0");
  if (config.iterations < 1) throw ConfigError("train_constrained: iterations must be >= 1");

  const std::size_t n = data.n;
  const std::vector<MomentRow> moments = build_moments(data, constraint.kind);
  const std::size_t nk = moments.size();

  // theta holds the exponentiated-gradient potentials for the 2*nk one-sided
  // constraints (+ then - for each moment).
  std::vector<double> theta(2 * nk, 0.0);
  std::vector<double> lambda(2 * nk, 0.0);
  std::vector<double> cost(n), weights(n), errors(n);
  std::vector<int> targets(n);

  RandomizedClassifier out;
  double best_score = std::numeric_limits<double>::infinity();
  std::size_t best_round = 0;

  for (int t = 1; t <= config.iterations; ++t) {
    // lambda from the potentials, capped at multiplier_bound in L1.
    double zmax = 0.0;
    for (double th : theta) zmax = std::max(zmax, th);
    double denom = std::exp(-zmax);  // the implicit "slack" coordinate at theta = 0
    for (double th : theta) denom += std::exp(th - zmax);
    for (std::size_t k = 0; k < 2 * nk; ++k)
      lambda[k] = config.multiplier_bound * std::exp(theta[k] - zmax) / denom;

    // Cost-sensitive best response: weight |c_i|, flip the target when the
    // combined cost of erring goes negative.
    for (std::size_t i = 0; i < n; ++i) cost[i] = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < nk; ++k) {
      const double l = lambda[2 * k] - lambda[2 * k + 1];
      if (l == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) cost[i] += l * moments[k].u[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      weights[i] = std::abs(cost[i]);
      targets[i] = cost[i] >= 0.0 ? data.label[i] : 1 - data.label[i];
    }

    const LogisticFit fit =
        fit_logistic_raw(n, data.dim, data.features.data(), targets, weights, config.base);
    out.members.push_back(fit.model);

    for (std::size_t i = 0; i < n; ++i)
      errors[i] = fit.model.predict(data.row(i)) != data.label[i] ? 1.0 : 0.0;

    double max_violation = -std::numeric_limits<double>::infinity();
    const double eta = config.eta0 / std::sqrt(static_cast<double>(t));
    for (std::size_t k = 0; k < nk; ++k) {
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) v += moments[k].u[i] * errors[i];
      theta[2 * k] += eta * (v - constraint.epsilon);
      theta[2 * k + 1] += eta * (-v - constraint.epsilon);
      max_violation = std::max(max_violation, std::abs(v) - constraint.epsilon);
    }

    if (config.selection == IterateSelection::BestRound) {
      double err_mean = 0.0;
      for (double e : errors) err_mean += e;
      err_mean /= static_cast<double>(n);
      const double score = err_mean + config.multiplier_bound * std::max(0.0, max_violation);
      if (score < best_score) {
        best_score = score;
        best_round = out.members.size() - 1;
      }
    }
  }

  if (config.selection == IterateSelection::BestRound) {
    RandomizedClassifier single;
    single.members.push_back(out.members[best_round]);
    single.mix_weights.push_back(1.0);
    return single;
  }
  out.mix_weights.assign(out.members.size(), 1.0 / static_cast<double>(out.members.size()));
  return out;
}

Evaluation evaluate(const RandomizedClassifier& model, const LabeledDataset& data,
                    const GroupSpace& space) {
  model.validate();
  if (data.n == 0) throw DataError("evaluate: empty dataset");

  std::vector<double> losses(data.n);
  double total = 0.0;
  for (std::size_t i = 0; i < data.n; ++i) {
    losses[i] = model.expected_error(data.row(i), data.label[i]);
    total += losses[i];
  }

  Evaluation ev;
  ev.accuracy = 1.0 - total / static_cast<double>(data.n);
  ev.profile = empirical_risk_profile(losses, data, space).profile;
  const FairKind kind =
      space.num_disc() == 1 ? FairKind::RiskParity : FairKind::ConditionalRiskParity;
  ev.gap = fairness_gap(ev.profile, FairSubspace(space, kind));
  return ev;
}

void save_model(const RandomizedClassifier& model, const std::string& path) {
  model.validate();
  std::ofstream out(path);
  if (!out) throw DataError("save_model: cannot open " + path);
  const std::size_t dim = model.members.front().weights.size();
  out << model.members.size() << " " << dim << "\n";
  char buf[32];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out << buf;
  };
  for (std::size_t m = 0; m < model.members.size(); ++m) {
    for (double w : model.members[m].weights) {
      put(w);
      out << " ";
    }
    put(model.members[m].bias);
    out << " ";
    put(model.mix_weights[m]);
    out << "\n";
  }
  if (!out) throw DataError("save_model: write failed on " + path);
}

RandomizedClassifier load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_model: cannot open " + path);
  std::size_t count = 0, dim = 0;
  if (!(in >> count >> dim) || count == 0) throw DataError("load_model: bad header in " + path);
  RandomizedClassifier model;
  model.members.resize(count);
  model.mix_weights.resize(count);
  for (std::size_t m = 0; m < count; ++m) {
    model.members[m].weights.resize(dim);
    for (double& w : model.members[m].weights) {
      if (!(in >> w)) throw DataError("load_model: truncated member in " + path);
    }
    if (!(in >> model.members[m].bias >> model.mix_weights[m]))
      throw DataError("load_model: truncated member in " + path);
  }
  model.validate();
  return model;
}

}  // namespace frm

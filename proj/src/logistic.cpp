#include "frm/logistic.hpp"

#include <algorithm>
#include <cmath>

namespace frm {

namespace {

double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

// log(1 + exp(-m)) without overflow.
double softplus_neg(double m) {
  if (m > 0.0) return std::log1p(std::exp(-m));
  return -m + std::log1p(std::exp(m));
}

// Cholesky solve of a small SPD system; returns false if not positive
// definite.
bool spd_solve(std::vector<double>& h, std::vector<double>& rhs, std::size_t d) {
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = h[i * d + j];
      for (std::size_t k = 0; k < j; ++k) s -= h[i * d + k] * h[j * d + k];
      if (i == j) {
        if (s <= 0.0) return false;
        h[i * d + i] = std::sqrt(s);
      } else {
        h[i * d + j] = s / h[j * d + j];
      }
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    double s = rhs[i];
    for (std::size_t k = 0; k < i; ++k) s -= h[i * d + k] * rhs[k];
    rhs[i] = s / h[i * d + i];
  }
  for (std::size_t i = d; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t k = i + 1; k < d; ++k) s -= h[k * d + i] * rhs[k];
    rhs[i] = s / h[i * d + i];
  }
  return true;
}

}  // namespace

double LinearClassifier::prob(const double* x) const { return sigmoid(score(x)); }

LogisticFit fit_logistic_raw(std::size_t n, std::size_t dim, const double* features,
                             const std::vector<int>& y01, const std::vector<double>& row_weights,
                             const LogisticConfig& config) {
  if (y01.size() != n || row_weights.size() != n)
    throw ShapeError("fit_logistic_raw: label/weight length mismatch");
  double total_weight = 0.0;
  for (double w : row_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DataError("fit_logistic_raw: bad row weight");
    total_weight += w;
  }
  if (total_weight <= 0.0) throw DataError("fit_logistic_raw: all row weights are zero");
  for (std::size_t i = 0; i < n * dim; ++i) {
    if (!std::isfinite(features[i])) throw DataError("fit_logistic_raw: non-finite feature");
  }

  bool saw0 = false, saw1 = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (row_weights[i] <= 0.0) continue;
    (y01[i] ? saw1 : saw0) = true;
  }
  if (!saw0 || !saw1) {
    LogisticFit fit;
    fit.model.weights.assign(dim, 0.0);
    fit.model.bias = saw1 ? 25.0 : -25.0;  // saturated constant scorer
    fit.degenerate_constant = true;
    return fit;
  }

  const std::size_t p = dim + 1;  // weights then bias
  std::vector<double> theta(p, 0.0);

  auto objective = [&](const std::vector<double>& th) {
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (row_weights[i] == 0.0) continue;
      double s = th[dim];
      const double* x = features + i * dim;
      for (std::size_t j = 0; j < dim; ++j) s += th[j] * x[j];
      const double margin = y01[i] ? s : -s;
      loss += row_weights[i] * softplus_neg(margin);
    }
    loss /= total_weight;
    double reg = 0.0;
    for (std::size_t j = 0; j < dim; ++j) reg += th[j] * th[j];
    return loss + 0.5 * config.l2 * reg;
  };

  LogisticFit fit;
  double cur_obj = objective(theta);
  std::vector<double> grad(p), hess(p * p), step(p), trial(p);

  for (int it = 0; it < config.max_newton_steps; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(hess.begin(), hess.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = row_weights[i];
      if (w == 0.0) continue;
      const double* x = features + i * dim;
      double s = theta[dim];
      for (std::size_t j = 0; j < dim; ++j) s += theta[j] * x[j];
      const double mu = sigmoid(s);
      const double r = w * (mu - static_cast<double>(y01[i]));
      const double h = std::max(w * mu * (1.0 - mu), w * 1e-12);
      for (std::size_t j = 0; j < dim; ++j) {
        grad[j] += r * x[j];
        for (std::size_t k = 0; k <= j; ++k) hess[j * p + k] += h * x[j] * x[k];
        hess[dim * p + j] += h * x[j];
      }
      grad[dim] += r;
      hess[dim * p + dim] += h;
    }
    for (std::size_t j = 0; j < p; ++j) grad[j] /= total_weight;
    for (std::size_t j = 0; j < p * p; ++j) hess[j] /= total_weight;
    for (std::size_t j = 0; j < dim; ++j) {
      grad[j] += config.l2 * theta[j];
      hess[j * p + j] += config.l2;
    }
    hess[dim * p + dim] += 1e-12;  // keep the bias block invertible
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t k = j + 1; k < p; ++k) hess[j * p + k] = hess[k * p + j];
    }

    double gnorm = 0.0;
    for (double ge : grad) gnorm += ge * ge;
    gnorm = std::sqrt(gnorm);
    fit.grad_norm = gnorm;
    fit.steps = it;
    if (gnorm <= config.grad_tol) break;

    step = grad;
    if (!spd_solve(hess, step, p)) break;

    // Newton with halving until the objective does not increase.
    double alpha = 1.0;
    bool accepted = false;
    for (int half = 0; half < 40; ++half) {
      for (std::size_t j = 0; j < p; ++j) trial[j] = theta[j] - alpha * step[j];
      const double obj = objective(trial);
      if (obj <= cur_obj + 1e-18) {
        theta = trial;
        cur_obj = obj;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }

  fit.model.weights.assign(theta.begin(), theta.begin() + dim);
  fit.model.bias = theta[dim];
  return fit;
}

LogisticFit weighted_logistic_fit(const LabeledDataset& data,
                                  const std::vector<double>& row_weights,
                                  const LogisticConfig& config) {
  data.validate();
  if (data.label_names.size() != 2)
    throw DataError("weighted_logistic_fit: needs a binary label vocabulary");
  return fit_logistic_raw(data.n, data.dim, data.features.data(), data.label, row_weights, config);
}

}  // namespace frm

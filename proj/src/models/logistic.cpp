#include "oaknee/models/logistic.hpp"

#include <algorithm>
#include <cmath>

#include "oaknee/error.hpp"

namespace oaknee::models {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double margin(std::span<const double> w, double b, const double* row) {
  double z = b;
  for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * row[j];
  return z;
}

void check_inputs(std::span<const double> features, std::size_t d, std::span<const int> labels) {
  if (d == 0 || features.size() != labels.size() * d) {
    throw ShapeError("feature matrix does not match " + std::to_string(labels.size()) + " labels of dimension " +
                     std::to_string(d));
  }
}

}  // namespace

double LogisticModel::predict(std::span<const double> x) const {
  if (x.size() != weights.size()) {
    throw ShapeError("logistic model expects " + std::to_string(weights.size()) + " features, got " +
                     std::to_string(x.size()));
  }
  return sigmoid(margin(weights, bias, x.data()));
}

double logistic_objective(std::span<const double> weights, double bias, std::span<const double> features,
                          std::size_t d, std::span<const int> labels, double l2_lambda) {
  check_inputs(features, d, labels);
  double loss = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double z = margin(weights, bias, features.data() + i * d);
    // -log p(y|x) = softplus(z) - y z
    loss += softplus(z) - (labels[i] == 1 ? z : 0.0);
  }
  double reg = 0.0;
  for (double w : weights) reg += w * w;
  return loss / static_cast<double>(labels.size()) + 0.5 * l2_lambda * reg;
}

LogisticModel fit_logistic(std::span<const double> features, std::size_t d, std::span<const int> labels,
                           double l2_lambda, std::size_t max_iter, double tol) {
  check_inputs(features, d, labels);
  if (l2_lambda < 0) throw InvalidArgument("l2_lambda must be >= 0");
  std::size_t pos = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw InvalidArgument("labels must be 0 or 1");
    pos += static_cast<std::size_t>(l);
  }
  if (pos == 0 || pos == labels.size()) throw DegenerateLabels("logistic regression needs both classes present");

  const std::size_t n = labels.size();
  LogisticModel m;
  m.l2_lambda = l2_lambda;
  m.weights.assign(d, 0.0);
  std::vector<double> gw(d), trial(d);
  double f = logistic_objective(m.weights, m.bias, features, d, labels, l2_lambda);
  m.objective_trace.push_back(f);
  double step = 1.0;

  for (std::size_t it = 0; it < max_iter; ++it) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = features.data() + i * d;
      const double r = sigmoid(margin(m.weights, m.bias, row)) - labels[i];
      for (std::size_t j = 0; j < d; ++j) gw[j] += r * row[j];
      gb += r;
    }
    double gnorm_inf = std::abs(gb / static_cast<double>(n));
    double gsq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      gw[j] = gw[j] / static_cast<double>(n) + l2_lambda * m.weights[j];
      gnorm_inf = std::max(gnorm_inf, std::abs(gw[j]));
      gsq += gw[j] * gw[j];
    }
    gb /= static_cast<double>(n);
    gsq += gb * gb;
    if (gnorm_inf < tol) {
      m.converged = true;
      break;
    }

    // Armijo backtracking; the accepted step seeds the next search (doubled).
    step = std::min(step * 2.0, 1e6);
    double f_new = f;
    double b_new = m.bias;
    while (true) {
      for (std::size_t j = 0; j < d; ++j) trial[j] = m.weights[j] - step * gw[j];
      b_new = m.bias - step * gb;
      f_new = logistic_objective(trial, b_new, features, d, labels, l2_lambda);
      if (f_new <= f - 0.5 * step * gsq) break;
      step *= 0.5;
      if (step < 1e-20) break;
    }
    if (step < 1e-20 || !(f_new <= f)) break;  // no further decrease is representable
    m.weights.swap(trial);
    m.bias = b_new;
    f = f_new;
    m.objective_trace.push_back(f);
    m.iterations = it + 1;
  }
  return m;
}

}  // namespace oaknee::models

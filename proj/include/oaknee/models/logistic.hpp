#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace oaknee::models {

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  double l2_lambda = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// Objective value after every accepted step, starting at the initial point.
  std::vector<double> objective_trace;

  /// sigmoid(w.x + b) for one feature row.
  double predict(std::span<const double> x) const;
};

/// Mean cross-entropy plus l2_lambda * |w|^2 / 2; the bias is not penalized.
/// `features` is row-major (n x d).
double logistic_objective(std::span<const double> weights, double bias, std::span<const double> features,
                          std::size_t d, std::span<const int> labels, double l2_lambda);

/// Full-batch gradient descent with Armijo backtracking from w = 0, b = 0.
/// Stops when the gradient infinity-norm drops below `tol` or after
/// `max_iter` steps. Throws DegenerateLabels when only one class is present.
LogisticModel fit_logistic(std::span<const double> features, std::size_t d, std::span<const int> labels,
                           double l2_lambda, std::size_t max_iter = 10000, double tol = 1e-6);

}  // namespace oaknee::models

#include "oaknee/nn/optim.hpp"

#include <cmath>

namespace oaknee::nn {

double step_learning_rate(double lr0, std::size_t epoch, std::size_t step_epochs, double factor) {
  if (step_epochs == 0) return lr0;
  return lr0 * std::pow(factor, static_cast<double>(epoch / step_epochs));
}

}  // namespace oaknee::nn

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "oaknee/models/networks.hpp"
#include "oaknee/nn/gradcheck.hpp"

namespace oaknee::models {

struct GradCheckSummary {
  std::string target;
  double tolerance = 0.0;
  double max_rel_error = 0.0;  // worst over all seeds
  std::size_t seeds = 0;
  std::size_t failures = 0;
  std::size_t probes = 0;   // finite-difference probes over all seeds
  std::size_t skipped = 0;  // probes straddling a max-pool / ReLU kink
  bool passed() const noexcept { return failures == 0; }
};

/// Reduced TinyCnn used for the composite check: 16x16 input, channels
/// {2, 3, 4}, hidden width 6.
NetConfig gradcheck_net_config(std::uint64_t seed);

/// Finite-difference checks of every layer, the loss and the composed TinyCnn
/// in double precision (epsilon 1e-5), each on `seeds` seeds. Tolerance 1e-4
/// for batch norm and the composite, 1e-5 otherwise.
std::vector<GradCheckSummary> run_gradcheck_suite(std::size_t seeds, std::uint64_t base_seed = 0);

}  // namespace oaknee::models

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oaknee/models/networks.hpp"

namespace oaknee::models {

enum class DType : std::uint8_t { kF32 = 1, kF64 = 2 };

/// Named parameter, buffer or preprocessing tensor. Values are held as
/// doubles; float tensors round-trip exactly.
struct TensorRecord {
  std::string name;
  DType dtype = DType::kF32;
  nn::Shape shape;
  std::vector<double> values;

  friend bool operator==(const TensorRecord&, const TensorRecord&) = default;
};

/// Everything needed to score new data: the family, which descriptor it was
/// trained on, its tensors and string metadata (architecture sizes,
/// preprocessing settings, training-configuration echo).
struct TrainedModel {
  Arch arch = Arch::kLogistic;
  std::string feature_tag;
  std::vector<TensorRecord> tensors;
  std::map<std::string, std::string> metadata;

  const TensorRecord& tensor(const std::string& name) const;
  const TensorRecord* find(const std::string& name) const;
  const std::string& meta(const std::string& key) const;

  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

/// Network sizes recorded in a model's metadata.
NetConfig net_config_of(const TrainedModel& model);
void store_net_config(TrainedModel& model, const NetConfig& cfg);

/// Rebuilds the network of an NN-family model with its trained weights.
std::unique_ptr<Network<float>> restore_network(const TrainedModel& model);

}  // namespace oaknee::models

#include "oaknee/models/trained_model.hpp"

#include <sstream>

#include "oaknee/error.hpp"

namespace oaknee::models {

namespace {

std::size_t parse_size(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw CheckpointError("metadata '" + key + "' is not an integer: '" + text + "'");
  }
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw CheckpointError("metadata '" + key + "' is not a number: '" + text + "'");
  }
}

template <typename Ref>
void load_into(const TrainedModel& model, const std::vector<Ref>& refs) {
  for (const auto& r : refs) {
    const TensorRecord& rec = model.tensor(r.name);
    if (rec.shape != r.value->shape()) {
      throw CheckpointError("tensor '" + r.name + "' has shape " + nn::shape_string(rec.shape) + ", network expects " +
                            nn::shape_string(r.value->shape()));
    }
    for (std::size_t i = 0; i < rec.values.size(); ++i) (*r.value)[i] = static_cast<float>(rec.values[i]);
  }
}

}  // namespace

const TensorRecord* TrainedModel::find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const TensorRecord& TrainedModel::tensor(const std::string& name) const {
  const TensorRecord* t = find(name);
  if (!t) throw CheckpointError("model has no tensor '" + name + "'");
  return *t;
}

const std::string& TrainedModel::meta(const std::string& key) const {
  const auto it = metadata.find(key);
  if (it == metadata.end()) throw CheckpointError("model metadata lacks '" + key + "'");
  return it->second;
}

void store_net_config(TrainedModel& model, const NetConfig& cfg) {
  std::string channels;
  for (std::size_t i = 0; i < cfg.channels.size(); ++i) {
    if (i) channels += ",";
    channels += std::to_string(cfg.channels[i]);
  }
  std::ostringstream dropout;
  dropout.precision(17);
  dropout << cfg.dropout;
  model.metadata["net.input_size"] = std::to_string(cfg.input_size);
  model.metadata["net.channels"] = channels;
  model.metadata["net.hidden"] = std::to_string(cfg.hidden);
  model.metadata["net.dropout"] = dropout.str();
  model.metadata["net.vector_dim"] = std::to_string(cfg.vector_dim);
  model.metadata["net.seed"] = std::to_string(cfg.seed);
}

NetConfig net_config_of(const TrainedModel& model) {
  NetConfig cfg;
  cfg.input_size = parse_size("net.input_size", model.meta("net.input_size"));
  cfg.channels.clear();
  std::stringstream ss(model.meta("net.channels"));
  std::string item;
  while (std::getline(ss, item, ',')) cfg.channels.push_back(parse_size("net.channels", item));
  if (cfg.channels.empty()) throw CheckpointError("metadata 'net.channels' is empty");
  cfg.hidden = parse_size("net.hidden", model.meta("net.hidden"));
  cfg.dropout = parse_double("net.dropout", model.meta("net.dropout"));
  cfg.vector_dim = parse_size("net.vector_dim", model.meta("net.vector_dim"));
  cfg.seed = parse_size("net.seed", model.meta("net.seed"));
  return cfg;
}

std::unique_ptr<Network<float>> restore_network(const TrainedModel& model) {
  if (model.arch == Arch::kLogistic) throw InvalidArgument("logistic models have no network");
  auto net = make_network<float>(model.arch, net_config_of(model));
  load_into(model, net->params());
  load_into(model, net->buffers());
  return net;
}

}  // namespace oaknee::models

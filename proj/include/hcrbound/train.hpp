#pragma once

#include <optional>
#include <vector>

#include "hcrbound/hcr.hpp"
#include "hcrbound/nn.hpp"
#include "hcrbound/rng.hpp"
#include "hcrbound/tensor.hpp"

namespace hcrbound {

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t batch_size = 32;
  std::size_t epochs = 6;
  double weight_decay = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
};

struct Dataset {
  std::vector<Tensor> images;
  std::vector<std::size_t> labels;
  std::size_t size() const { return images.size(); }
};

struct CrossEntropyResult {
  double loss = 0.0;
  Tensor grad;  // d loss / d logits = softmax(logits) - one_hot(label)
};
CrossEntropyResult cross_entropy_grad(const Tensor& logits, std::size_t label);

struct AdamState {
  Tensor m;
  Tensor v;
};
// Decoupled weight decay: decay hits the parameters directly, the moments
// only see the gradient.
void adamw_step(Tensor& params, const Tensor& grads, AdamState& state,
                std::size_t step_index, const TrainConfig& config);

// Uniform +-1/sqrt(fan_in) weights and biases.
void init_weights(Model& model, std::uint64_t seed);

// Minibatched AdamW training against cross-entropy on the logits (the model
// may end in Softmax; it is skipped during training and gradients are taken
// at the logits). Returns the mean training loss per epoch.
std::vector<double> train_model(Model& model, const Dataset& data,
                                const TrainConfig& config);

double evaluate_accuracy(const Model& model, const Dataset& data,
                         const std::optional<NoiseModel>& noise,
                         const RngStream& rng);

}  // namespace hcrbound

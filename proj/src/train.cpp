#include "hcrbound/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hcrbound {

CrossEntropyResult cross_entropy_grad(const Tensor& logits, std::size_t label) {
  if (label >= logits.size())
    throw std::invalid_argument("cross_entropy_grad: label out of range");
  double m = *std::max_element(logits.data.begin(), logits.data.end());
  double lse = 0.0;
  for (double v : logits.data) lse += std::exp(v - m);
  lse = m + std::log(lse);
  CrossEntropyResult res;
  res.loss = lse - logits[label];
  res.grad = logits;
  for (std::size_t i = 0; i < logits.size(); ++i)
    res.grad[i] = std::exp(logits[i] - lse);
  res.grad[label] -= 1.0;
  return res;
}

void adamw_step(Tensor& params, const Tensor& grads, AdamState& state,
                std::size_t step_index, const TrainConfig& config) {
  if (!params.same_shape(grads))
    throw std::invalid_argument("adamw_step: shape mismatch");
  if (step_index < 1)
    throw std::invalid_argument("adamw_step: step_index must be >= 1");
  if (state.m.size() == 0) {
    state.m = zeros(params.shape);
    state.v = zeros(params.shape);
  }
  double b1 = config.adam_beta1, b2 = config.adam_beta2;
  double bc1 = 1.0 - std::pow(b1, static_cast<double>(step_index));
  double bc2 = 1.0 - std::pow(b2, static_cast<double>(step_index));
  for (std::size_t i = 0; i < params.size(); ++i) {
    double g = grads[i];
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
    double mhat = state.m[i] / bc1;
    double vhat = state.v[i] / bc2;
    params[i] -= config.learning_rate * config.weight_decay * params[i];
    params[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.adam_eps);
  }
}

void init_weights(Model& model, std::uint64_t seed) {
  RngStream rng(seed, 0xfeedULL);
  for (std::size_t li = 0; li < model.layers.size(); ++li) {
    Layer& l = model.layers[li];
    if (!l.has_params()) continue;
    std::size_t fan_in = l.kind == LayerKind::Affine
                             ? l.in_dim
                             : l.in_channels * l.kernel_h * l.kernel_w;
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    RngStream lrng = rng.substream(li);
    for (double& w : l.weight.data) w = bound * (2.0 * lrng.next_uniform() - 1.0);
    for (double& b : l.bias.data) b = bound * (2.0 * lrng.next_uniform() - 1.0);
  }
}

namespace {

// Layers participating in the loss: everything up to a trailing Softmax.
std::span<const Layer> logits_layers(const Model& model) {
  std::size_t n = model.layers.size();
  if (n > 0 && model.layers.back().kind == LayerKind::Softmax) --n;
  return std::span<const Layer>(model.layers.data(), n);
}

void fisher_yates(std::vector<std::size_t>& idx, RngStream& rng) {
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng.next_u64() % i]);
}

}  // namespace

std::vector<double> train_model(Model& model, const Dataset& data,
                                const TrainConfig& config) {
  if (data.size() == 0)
    throw std::invalid_argument("train_model: empty dataset");
  auto layers = logits_layers(model);
  std::vector<AdamState> states(model.layers.size() * 2);  // weight, bias per layer
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  RngStream shuffle_rng(config.seed, 0x5f5fULL);

  std::vector<double> epoch_losses;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    fisher_yates(order, shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < data.size();
         start += config.batch_size) {
      std::size_t end = std::min(start + config.batch_size, data.size());
      double inv_batch = 1.0 / static_cast<double>(end - start);
      std::vector<LayerGrads> acc(model.layers.size());
      for (std::size_t b = start; b < end; ++b) {
        std::size_t ex = order[b];
        Trace trace = forward_trace(layers, data.images[ex]);
        CrossEntropyResult ce =
            cross_entropy_grad(trace.output(), data.labels[ex]);
        loss_sum += ce.loss;
        BackwardResult bw = backward(layers, trace, ce.grad);
        for (std::size_t li = 0; li < layers.size(); ++li) {
          if (!bw.params[li].present) continue;
          if (!acc[li].present) {
            acc[li] = std::move(bw.params[li]);
          } else {
            axpy(1.0, bw.params[li].weight, acc[li].weight);
            axpy(1.0, bw.params[li].bias, acc[li].bias);
          }
        }
      }
      ++step;
      for (std::size_t li = 0; li < layers.size(); ++li) {
        if (!acc[li].present) continue;
        Layer& l = model.layers[li];
        for (double& g : acc[li].weight.data) g *= inv_batch;
        for (double& g : acc[li].bias.data) g *= inv_batch;
        adamw_step(l.weight, acc[li].weight, states[2 * li], step, config);
        adamw_step(l.bias, acc[li].bias, states[2 * li + 1], step, config);
      }
    }
    epoch_losses.push_back(loss_sum / static_cast<double>(data.size()));
  }
  return epoch_losses;
}

double evaluate_accuracy(const Model& model, const Dataset& data,
                         const std::optional<NoiseModel>& noise,
                         const RngStream& rng) {
  if (data.size() == 0)
    throw std::invalid_argument("evaluate_accuracy: empty dataset");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    Tensor features = forward(model.feature_prefix(), data.images[i]);
    if (noise) {
      RngStream ex_rng = rng.substream(i);
      Tensor z = noise->sample(ex_rng, features.shape);
      features = add(features, z);
    }
    if (classify(model, features) == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace hcrbound

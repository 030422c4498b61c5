#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hcrbound/tensor.hpp"

namespace hcrbound {

enum class LayerKind : std::uint8_t {
  Affine = 0,
  ReLU = 1,
  Flatten = 2,
  Softmax = 3,
  Conv2D = 4,
  MaxPool2D = 5,
};

// One layer of the zoo. Affine multiplies a row vector from the right by an
// (in_dim x out_dim) matrix and adds a bias. Conv2D takes (C,H,W) input with
// zero padding; MaxPool2D strides over (C,H,W) windows.
struct Layer {
  LayerKind kind = LayerKind::ReLU;

  // Affine
  std::size_t in_dim = 0, out_dim = 0;
  // Conv2D
  std::size_t in_channels = 0, out_channels = 0;
  std::size_t kernel_h = 0, kernel_w = 0;
  std::size_t stride = 1, padding = 0;
  // MaxPool2D
  std::size_t pool_kh = 0, pool_kw = 0, stride_h = 0, stride_w = 0;

  Tensor weight;  // Affine: (in,out); Conv2D: (out_ch,in_ch,kh,kw)
  Tensor bias;    // Affine: (out); Conv2D: (out_ch)

  static Layer affine(std::size_t in, std::size_t out);
  static Layer relu();
  static Layer flatten();
  static Layer softmax();
  static Layer conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kh,
                      std::size_t kw, std::size_t stride = 1,
                      std::size_t padding = 0);
  static Layer maxpool2d(std::size_t kh, std::size_t kw, std::size_t sh,
                         std::size_t sw);

  std::vector<std::size_t> output_shape(
      const std::vector<std::size_t>& in_shape) const;
  bool has_params() const {
    return kind == LayerKind::Affine || kind == LayerKind::Conv2D;
  }
};

// Ordered layer list; layers [0, feature_boundary) form the feature
// extractor, the rest the classifier.
struct Model {
  std::vector<Layer> layers;
  std::size_t feature_boundary = 0;

  std::span<const Layer> feature_prefix() const {
    return std::span<const Layer>(layers.data(), feature_boundary);
  }
  std::span<const Layer> classifier_suffix() const {
    return std::span<const Layer>(layers.data() + feature_boundary,
                                  layers.size() - feature_boundary);
  }
};

// Saved activations of one forward pass: acts[0] is the input,
// acts[i+1] the output of layer i. JVP and VJP both replay this tape, so
// one primal evaluation serves arbitrarily many Jacobian products.
struct Trace {
  std::vector<Tensor> acts;
  const Tensor& input() const { return acts.front(); }
  const Tensor& output() const { return acts.back(); }
};

Tensor layer_forward(const Layer& layer, const Tensor& in);

Trace forward_trace(std::span<const Layer> layers, const Tensor& in);
Tensor forward(std::span<const Layer> layers, const Tensor& in);

// Tangent propagation (Jacobian . v) over a saved trace.
Tensor jvp(std::span<const Layer> layers, const Trace& trace, const Tensor& v);
// Adjoint propagation (Jacobian^T . u) over a saved trace.
Tensor vjp(std::span<const Layer> layers, const Trace& trace, const Tensor& u);

Tensor jvp(std::span<const Layer> layers, const Tensor& theta, const Tensor& v);
Tensor vjp(std::span<const Layer> layers, const Tensor& theta, const Tensor& u);

// Per-layer parameter gradients from one reverse sweep.
struct LayerGrads {
  Tensor weight;
  Tensor bias;
  bool present = false;
};
struct BackwardResult {
  Tensor input_grad;
  std::vector<LayerGrads> params;  // one entry per layer
};
BackwardResult backward(std::span<const Layer> layers, const Trace& trace,
                        const Tensor& out_grad);

// Argmax over classifier outputs; ties break to the lowest index.
std::size_t classify(const Model& model, const Tensor& features);

void save_weights(const Model& model, const std::string& path);
Model load_weights(const std::string& path);

}  // namespace hcrbound

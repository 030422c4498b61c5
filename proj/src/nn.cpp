#include "hcrbound/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace hcrbound {

Layer Layer::affine(std::size_t in, std::size_t out) {
  Layer l;
  l.kind = LayerKind::Affine;
  l.in_dim = in;
  l.out_dim = out;
  l.weight = zeros({in, out});
  l.bias = zeros({out});
  return l;
}

Layer Layer::relu() {
  Layer l;
  l.kind = LayerKind::ReLU;
  return l;
}

Layer Layer::flatten() {
  Layer l;
  l.kind = LayerKind::Flatten;
  return l;
}

Layer Layer::softmax() {
  Layer l;
  l.kind = LayerKind::Softmax;
  return l;
}

Layer Layer::conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kh,
                    std::size_t kw, std::size_t stride, std::size_t padding) {
  Layer l;
  l.kind = LayerKind::Conv2D;
  l.in_channels = in_ch;
  l.out_channels = out_ch;
  l.kernel_h = kh;
  l.kernel_w = kw;
  l.stride = stride;
  l.padding = padding;
  l.weight = zeros({out_ch, in_ch, kh, kw});
  l.bias = zeros({out_ch});
  return l;
}

Layer Layer::maxpool2d(std::size_t kh, std::size_t kw, std::size_t sh,
                       std::size_t sw) {
  Layer l;
  l.kind = LayerKind::MaxPool2D;
  l.pool_kh = kh;
  l.pool_kw = kw;
  l.stride_h = sh;
  l.stride_w = sw;
  return l;
}

namespace {

std::size_t conv_out(std::size_t in, std::size_t pad, std::size_t k,
                     std::size_t stride) {
  if (in + 2 * pad < k)
    throw std::invalid_argument("conv/pool kernel larger than padded input");
  return (in + 2 * pad - k) / stride + 1;
}

void require_chw(const std::vector<std::size_t>& s, const char* what) {
  if (s.size() != 3)
    throw std::invalid_argument(std::string(what) + ": expected (C,H,W) input, got " +
                                shape_str(s));
}

}  // namespace

std::vector<std::size_t> Layer::output_shape(
    const std::vector<std::size_t>& in_shape) const {
  switch (kind) {
    case LayerKind::Affine:
      if (shape_numel(in_shape) != in_dim)
        throw std::invalid_argument("Affine: input size " +
                                    std::to_string(shape_numel(in_shape)) +
                                    " != " + std::to_string(in_dim));
      return {out_dim};
    case LayerKind::ReLU:
    case LayerKind::Softmax:
      return in_shape;
    case LayerKind::Flatten:
      return {shape_numel(in_shape)};
    case LayerKind::Conv2D: {
      require_chw(in_shape, "Conv2D");
      if (in_shape[0] != in_channels)
        throw std::invalid_argument("Conv2D: channel mismatch");
      return {out_channels, conv_out(in_shape[1], padding, kernel_h, stride),
              conv_out(in_shape[2], padding, kernel_w, stride)};
    }
    case LayerKind::MaxPool2D: {
      require_chw(in_shape, "MaxPool2D");
      return {in_shape[0], conv_out(in_shape[1], 0, pool_kh, stride_h),
              conv_out(in_shape[2], 0, pool_kw, stride_w)};
    }
  }
  throw std::logic_error("unknown layer kind");
}

namespace {

Tensor affine_forward(const Layer& l, const Tensor& x, bool with_bias = true) {
  Tensor y({l.out_dim});
  if (with_bias)
    for (std::size_t j = 0; j < l.out_dim; ++j) y[j] = l.bias[j];
  for (std::size_t i = 0; i < l.in_dim; ++i) {
    double xi = x[i];
    if (xi == 0.0) continue;
    const double* row = l.weight.data.data() + i * l.out_dim;
    for (std::size_t j = 0; j < l.out_dim; ++j) y[j] += xi * row[j];
  }
  return y;
}

// dx = W u
Tensor affine_vjp(const Layer& l, const Tensor& u) {
  Tensor dx({l.in_dim});
  for (std::size_t i = 0; i < l.in_dim; ++i) {
    const double* row = l.weight.data.data() + i * l.out_dim;
    double acc = 0.0;
    for (std::size_t j = 0; j < l.out_dim; ++j) acc += row[j] * u[j];
    dx[i] = acc;
  }
  return dx;
}

Tensor softmax_forward(const Tensor& x) {
  Tensor y = x;
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x.data) m = std::max(m, v);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = std::exp(x[i] - m);
    sum += y[i];
  }
  for (double& v : y.data) v /= sum;
  return y;
}

Tensor conv_forward(const Layer& l, const Tensor& x, bool with_bias) {
  auto os = l.output_shape(x.shape);
  std::size_t H = x.shape[1], W = x.shape[2];
  std::size_t OH = os[1], OW = os[2];
  Tensor y(os);
  for (std::size_t oc = 0; oc < l.out_channels; ++oc) {
    for (std::size_t oy = 0; oy < OH; ++oy) {
      for (std::size_t ox = 0; ox < OW; ++ox) {
        double acc = with_bias ? l.bias[oc] : 0.0;
        for (std::size_t ic = 0; ic < l.in_channels; ++ic) {
          for (std::size_t ky = 0; ky < l.kernel_h; ++ky) {
            std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * l.stride + ky) -
                                static_cast<std::ptrdiff_t>(l.padding);
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(H)) continue;
            for (std::size_t kx = 0; kx < l.kernel_w; ++kx) {
              std::ptrdiff_t ix =
                  static_cast<std::ptrdiff_t>(ox * l.stride + kx) -
                  static_cast<std::ptrdiff_t>(l.padding);
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(W)) continue;
              double w = l.weight[((oc * l.in_channels + ic) * l.kernel_h + ky) *
                                      l.kernel_w +
                                  kx];
              acc += w * x[(ic * H + iy) * W + ix];
            }
          }
        }
        y[(oc * OH + oy) * OW + ox] = acc;
      }
    }
  }
  return y;
}

Tensor conv_vjp(const Layer& l, const Tensor& x, const Tensor& u) {
  auto os = l.output_shape(x.shape);
  std::size_t H = x.shape[1], W = x.shape[2];
  std::size_t OH = os[1], OW = os[2];
  Tensor dx(x.shape);
  for (std::size_t oc = 0; oc < l.out_channels; ++oc) {
    for (std::size_t oy = 0; oy < OH; ++oy) {
      for (std::size_t ox = 0; ox < OW; ++ox) {
        double g = u[(oc * OH + oy) * OW + ox];
        if (g == 0.0) continue;
        for (std::size_t ic = 0; ic < l.in_channels; ++ic) {
          for (std::size_t ky = 0; ky < l.kernel_h; ++ky) {
            std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * l.stride + ky) -
                                static_cast<std::ptrdiff_t>(l.padding);
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(H)) continue;
            for (std::size_t kx = 0; kx < l.kernel_w; ++kx) {
              std::ptrdiff_t ix =
                  static_cast<std::ptrdiff_t>(ox * l.stride + kx) -
                  static_cast<std::ptrdiff_t>(l.padding);
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(W)) continue;
              double w = l.weight[((oc * l.in_channels + ic) * l.kernel_h + ky) *
                                      l.kernel_w +
                                  kx];
              dx[(ic * H + iy) * W + ix] += w * g;
            }
          }
        }
      }
    }
  }
  return dx;
}

// First (row-major) maximal index wins pooling ties.
std::size_t pool_argmax(const Layer& l, const Tensor& x, std::size_t c,
                        std::size_t oy, std::size_t ox) {
  std::size_t H = x.shape[1], W = x.shape[2];
  std::size_t best = 0;
  double bestv = -std::numeric_limits<double>::infinity();
  for (std::size_t ky = 0; ky < l.pool_kh; ++ky) {
    std::size_t iy = oy * l.stride_h + ky;
    for (std::size_t kx = 0; kx < l.pool_kw; ++kx) {
      std::size_t ix = ox * l.stride_w + kx;
      std::size_t idx = (c * H + iy) * W + ix;
      if (x[idx] > bestv) {
        bestv = x[idx];
        best = idx;
      }
    }
  }
  return best;
}

Tensor pool_forward(const Layer& l, const Tensor& x) {
  auto os = l.output_shape(x.shape);
  std::size_t C = os[0], OH = os[1], OW = os[2];
  Tensor y(os);
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t oy = 0; oy < OH; ++oy)
      for (std::size_t ox = 0; ox < OW; ++ox)
        y[(c * OH + oy) * OW + ox] = x[pool_argmax(l, x, c, oy, ox)];
  return y;
}

}  // namespace

Tensor layer_forward(const Layer& layer, const Tensor& in) {
  switch (layer.kind) {
    case LayerKind::Affine:
      layer.output_shape(in.shape);
      return affine_forward(layer, reshape(in, {layer.in_dim}));
    case LayerKind::ReLU: {
      Tensor y = in;
      for (double& v : y.data) v = v > 0.0 ? v : 0.0;
      return y;
    }
    case LayerKind::Flatten:
      return reshape(in, {in.size()});
    case LayerKind::Softmax:
      return softmax_forward(in);
    case LayerKind::Conv2D:
      return conv_forward(layer, in, true);
    case LayerKind::MaxPool2D:
      return pool_forward(layer, in);
  }
  throw std::logic_error("unknown layer kind");
}

Trace forward_trace(std::span<const Layer> layers, const Tensor& in) {
  Trace t;
  t.acts.reserve(layers.size() + 1);
  t.acts.push_back(in);
  for (const Layer& l : layers) t.acts.push_back(layer_forward(l, t.acts.back()));
  require_finite(t.acts.back(), "forward");
  return t;
}

Tensor forward(std::span<const Layer> layers, const Tensor& in) {
  Tensor x = in;
  for (const Layer& l : layers) x = layer_forward(l, x);
  require_finite(x, "forward");
  return x;
}

Tensor jvp(std::span<const Layer> layers, const Trace& trace, const Tensor& v) {
  if (!v.same_shape(trace.input()))
    throw std::invalid_argument("jvp: tangent shape mismatch");
  Tensor d = v;
  for (std::size_t li = 0; li < layers.size(); ++li) {
    const Layer& l = layers[li];
    const Tensor& x = trace.acts[li];
    const Tensor& y = trace.acts[li + 1];
    switch (l.kind) {
      case LayerKind::Affine:
        d = affine_forward(l, reshape(d, {l.in_dim}), /*with_bias=*/false);
        break;
      case LayerKind::ReLU:
        for (std::size_t i = 0; i < d.size(); ++i)
          if (!(x[i] > 0.0)) d[i] = 0.0;
        break;
      case LayerKind::Flatten:
        d = reshape(d, {d.size()});
        break;
      case LayerKind::Softmax: {
        double s = dot(y, d);
        Tensor nd = y;
        for (std::size_t i = 0; i < nd.size(); ++i) nd[i] = y[i] * (d[i] - s);
        d = std::move(nd);
        break;
      }
      case LayerKind::Conv2D:
        d = conv_forward(l, d, false);
        break;
      case LayerKind::MaxPool2D: {
        auto os = l.output_shape(x.shape);
        Tensor nd(os);
        std::size_t C = os[0], OH = os[1], OW = os[2];
        for (std::size_t c = 0; c < C; ++c)
          for (std::size_t oy = 0; oy < OH; ++oy)
            for (std::size_t ox = 0; ox < OW; ++ox)
              nd[(c * OH + oy) * OW + ox] = d[pool_argmax(l, x, c, oy, ox)];
        d = std::move(nd);
        break;
      }
    }
  }
  require_finite(d, "jvp");
  return d;
}

Tensor vjp(std::span<const Layer> layers, const Trace& trace, const Tensor& u) {
  BackwardResult r = backward(layers, trace, u);
  return std::move(r.input_grad);
}

Tensor jvp(std::span<const Layer> layers, const Tensor& theta, const Tensor& v) {
  Trace t = forward_trace(layers, theta);
  return jvp(layers, t, v);
}

Tensor vjp(std::span<const Layer> layers, const Tensor& theta, const Tensor& u) {
  Trace t = forward_trace(layers, theta);
  return vjp(layers, t, u);
}

BackwardResult backward(std::span<const Layer> layers, const Trace& trace,
                        const Tensor& out_grad) {
  if (!out_grad.same_shape(trace.output()))
    throw std::invalid_argument("backward: adjoint shape mismatch");
  BackwardResult res;
  res.params.resize(layers.size());
  Tensor g = out_grad;
  for (std::size_t li = layers.size(); li-- > 0;) {
    const Layer& l = layers[li];
    const Tensor& x = trace.acts[li];
    const Tensor& y = trace.acts[li + 1];
    switch (l.kind) {
      case LayerKind::Affine: {
        Tensor xin = reshape(x, {l.in_dim});
        LayerGrads& pg = res.params[li];
        pg.present = true;
        pg.weight = zeros({l.in_dim, l.out_dim});
        pg.bias = g;
        for (std::size_t i = 0; i < l.in_dim; ++i) {
          double xi = xin[i];
          if (xi == 0.0) continue;
          double* row = pg.weight.data.data() + i * l.out_dim;
          for (std::size_t j = 0; j < l.out_dim; ++j) row[j] = xi * g[j];
        }
        g = reshape(affine_vjp(l, g), x.shape);
        break;
      }
      case LayerKind::ReLU:
        for (std::size_t i = 0; i < g.size(); ++i)
          if (!(x[i] > 0.0)) g[i] = 0.0;
        break;
      case LayerKind::Flatten:
        g = reshape(g, x.shape);
        break;
      case LayerKind::Softmax: {
        double s = dot(g, y);
        Tensor ng = y;
        for (std::size_t i = 0; i < ng.size(); ++i) ng[i] = y[i] * (g[i] - s);
        g = std::move(ng);
        break;
      }
      case LayerKind::Conv2D: {
        auto os = l.output_shape(x.shape);
        std::size_t H = x.shape[1], W = x.shape[2];
        std::size_t OH = os[1], OW = os[2];
        LayerGrads& pg = res.params[li];
        pg.present = true;
        pg.weight = zeros(l.weight.shape);
        pg.bias = zeros(l.bias.shape);
        for (std::size_t oc = 0; oc < l.out_channels; ++oc) {
          for (std::size_t oy = 0; oy < OH; ++oy) {
            for (std::size_t ox = 0; ox < OW; ++ox) {
              double gv = g[(oc * OH + oy) * OW + ox];
              if (gv == 0.0) continue;
              pg.bias[oc] += gv;
              for (std::size_t ic = 0; ic < l.in_channels; ++ic) {
                for (std::size_t ky = 0; ky < l.kernel_h; ++ky) {
                  std::ptrdiff_t iy =
                      static_cast<std::ptrdiff_t>(oy * l.stride + ky) -
                      static_cast<std::ptrdiff_t>(l.padding);
                  if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(H)) continue;
                  for (std::size_t kx = 0; kx < l.kernel_w; ++kx) {
                    std::ptrdiff_t ix =
                        static_cast<std::ptrdiff_t>(ox * l.stride + kx) -
                        static_cast<std::ptrdiff_t>(l.padding);
                    if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(W))
                      continue;
                    pg.weight[((oc * l.in_channels + ic) * l.kernel_h + ky) *
                                  l.kernel_w +
                              kx] += gv * x[(ic * H + iy) * W + ix];
                  }
                }
              }
            }
          }
        }
        g = conv_vjp(l, x, g);
        break;
      }
      case LayerKind::MaxPool2D: {
        auto os = l.output_shape(x.shape);
        Tensor ng(x.shape);
        std::size_t C = os[0], OH = os[1], OW = os[2];
        for (std::size_t c = 0; c < C; ++c)
          for (std::size_t oy = 0; oy < OH; ++oy)
            for (std::size_t ox = 0; ox < OW; ++ox)
              ng[pool_argmax(l, x, c, oy, ox)] += g[(c * OH + oy) * OW + ox];
        g = std::move(ng);
        break;
      }
    }
  }
  require_finite(g, "backward");
  res.input_grad = std::move(g);
  return res;
}

std::size_t classify(const Model& model, const Tensor& features) {
  Tensor conf = forward(model.classifier_suffix(), features);
  std::size_t best = 0;
  for (std::size_t i = 1; i < conf.size(); ++i)
    if (conf[i] > conf[best]) best = i;
  return best;
}

// ---- HCRW1 serialization ----------------------------------------------

namespace {

constexpr char kMagic[5] = {'H', 'C', 'R', 'W', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4))
    throw std::runtime_error("HCRW1: truncated file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8))
    throw std::runtime_error("HCRW1: truncated payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

std::vector<std::uint32_t> layer_shape_ints(const Layer& l) {
  switch (l.kind) {
    case LayerKind::Affine:
      return {static_cast<std::uint32_t>(l.in_dim),
              static_cast<std::uint32_t>(l.out_dim)};
    case LayerKind::Conv2D:
      return {static_cast<std::uint32_t>(l.in_channels),
              static_cast<std::uint32_t>(l.out_channels),
              static_cast<std::uint32_t>(l.kernel_h),
              static_cast<std::uint32_t>(l.kernel_w),
              static_cast<std::uint32_t>(l.stride),
              static_cast<std::uint32_t>(l.padding)};
    case LayerKind::MaxPool2D:
      return {static_cast<std::uint32_t>(l.pool_kh),
              static_cast<std::uint32_t>(l.pool_kw),
              static_cast<std::uint32_t>(l.stride_h),
              static_cast<std::uint32_t>(l.stride_w)};
    default:
      return {};
  }
}

}  // namespace

void save_weights(const Model& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_weights: cannot open " + path);
  os.write(kMagic, 5);
  put_u32(os, static_cast<std::uint32_t>(model.layers.size()));
  for (const Layer& l : model.layers) {
    char tag = static_cast<char>(l.kind);
    os.write(&tag, 1);
    auto ints = layer_shape_ints(l);
    put_u32(os, static_cast<std::uint32_t>(ints.size()));
    for (std::uint32_t v : ints) put_u32(os, v);
    if (l.has_params()) {
      for (double v : l.weight.data) put_f64(os, v);
      for (double v : l.bias.data) put_f64(os, v);
    }
  }
  if (!os) throw std::runtime_error("save_weights: write failure on " + path);
}

Model load_weights(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_weights: cannot open " + path);
  char magic[5];
  if (!is.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0)
    throw std::runtime_error("load_weights: bad magic in " + path);
  std::uint32_t nlayers = get_u32(is);
  Model model;
  for (std::uint32_t li = 0; li < nlayers; ++li) {
    char tag;
    if (!is.read(&tag, 1)) throw std::runtime_error("HCRW1: truncated file");
    std::uint32_t nints = get_u32(is);
    std::vector<std::uint32_t> ints(nints);
    for (auto& v : ints) v = get_u32(is);
    Layer l;
    switch (static_cast<LayerKind>(tag)) {
      case LayerKind::Affine:
        if (nints != 2) throw std::runtime_error("HCRW1: bad Affine shape");
        l = Layer::affine(ints[0], ints[1]);
        break;
      case LayerKind::ReLU:
        l = Layer::relu();
        break;
      case LayerKind::Flatten:
        l = Layer::flatten();
        break;
      case LayerKind::Softmax:
        l = Layer::softmax();
        break;
      case LayerKind::Conv2D:
        if (nints != 6) throw std::runtime_error("HCRW1: bad Conv2D shape");
        l = Layer::conv2d(ints[0], ints[1], ints[2], ints[3], ints[4], ints[5]);
        break;
      case LayerKind::MaxPool2D:
        if (nints != 4) throw std::runtime_error("HCRW1: bad MaxPool2D shape");
        l = Layer::maxpool2d(ints[0], ints[1], ints[2], ints[3]);
        break;
      default:
        throw std::runtime_error("HCRW1: unknown layer tag " +
                                 std::to_string(static_cast<int>(tag)));
    }
    if (l.has_params()) {
      for (double& v : l.weight.data) v = get_f64(is);
      for (double& v : l.bias.data) v = get_f64(is);
    }
    model.layers.push_back(std::move(l));
  }
  // Classifier convention: a trailing Affine+Softmax pair; everything
  // before it is the feature extractor.
  if (model.layers.size() >= 2 &&
      model.layers.back().kind == LayerKind::Softmax)
    model.feature_boundary = model.layers.size() - 2;
  else
    model.feature_boundary = model.layers.size();
  return model;
}

}  // namespace hcrbound

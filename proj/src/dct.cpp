#include "hcrbound/dct.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hcrbound {

namespace {

// Orthonormal DCT-II matrix: D[k][j] = c_k cos(pi k (2j+1) / (2N)),
// c_0 = sqrt(1/N), c_k = sqrt(2/N) for k > 0.
std::vector<double> dct_matrix(std::size_t n) {
  std::vector<double> d(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    double ck = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n));
    for (std::size_t j = 0; j < n; ++j)
      d[k * n + j] = ck * std::cos(std::numbers::pi * static_cast<double>(k) *
                                   (2.0 * static_cast<double>(j) + 1.0) /
                                   (2.0 * static_cast<double>(n)));
  }
  return d;
}

void require_chw(const Tensor& t) {
  if (t.shape.size() != 3)
    throw std::invalid_argument("dct: expected (C,H,W) tensor, got " +
                                shape_str(t.shape));
}

// Per channel: out = Dh * X * Dw^T when forward, Dh^T * X * Dw otherwise.
Tensor apply_separable(const Tensor& in, bool forward) {
  require_chw(in);
  std::size_t C = in.shape[0], H = in.shape[1], W = in.shape[2];
  auto dh = dct_matrix(H);
  auto dw = dct_matrix(W);
  Tensor out(in.shape);
  std::vector<double> tmp(H * W);
  for (std::size_t c = 0; c < C; ++c) {
    const double* x = in.data.data() + c * H * W;
    // rows: tmp = (Dh or Dh^T) * X
    for (std::size_t r = 0; r < H; ++r)
      for (std::size_t j = 0; j < W; ++j) {
        double acc = 0.0;
        for (std::size_t m = 0; m < H; ++m)
          acc += (forward ? dh[r * H + m] : dh[m * H + r]) * x[m * W + j];
        tmp[r * W + j] = acc;
      }
    // columns
    double* y = out.data.data() + c * H * W;
    for (std::size_t r = 0; r < H; ++r)
      for (std::size_t s = 0; s < W; ++s) {
        double acc = 0.0;
        for (std::size_t m = 0; m < W; ++m)
          acc += tmp[r * W + m] * (forward ? dw[s * W + m] : dw[m * W + s]);
        y[r * W + s] = acc;
      }
  }
  return out;
}

}  // namespace

Tensor dct2(const Tensor& image) { return apply_separable(image, true); }

Tensor idct2(const Tensor& coeffs) { return apply_separable(coeffs, false); }

Tensor lowpass_filter(const Tensor& coeffs, std::size_t k) {
  require_chw(coeffs);
  std::size_t H = coeffs.shape[1], W = coeffs.shape[2];
  if (k == 0 || k > std::min(H, W))
    throw std::invalid_argument("lowpass_filter: k out of range");
  Tensor out = coeffs;
  for (std::size_t c = 0; c < coeffs.shape[0]; ++c)
    for (std::size_t r = 0; r < H; ++r)
      for (std::size_t s = 0; s < W; ++s)
        if (r >= k || s >= k) out[(c * H + r) * W + s] = 0.0;
  return out;
}

}  // namespace hcrbound

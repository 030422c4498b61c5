#pragma once

#include "hcrbound/tensor.hpp"

namespace hcrbound {

// Separable orthonormal type-II DCT over (C,H,W) tensors, applied per
// channel. Mode (0,0) is the DC component; the transform preserves the
// Euclidean norm (Parseval).
Tensor dct2(const Tensor& image);
Tensor idct2(const Tensor& coeffs);

// Keep modes with both frequency indices < k, zero the rest.
Tensor lowpass_filter(const Tensor& coeffs, std::size_t k);

}  // namespace hcrbound

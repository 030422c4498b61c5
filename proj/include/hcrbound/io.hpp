#pragma once

#include <string>

#include "hcrbound/tensor.hpp"

namespace hcrbound {

// Big-endian IDX (the MNIST distribution format). Only the unsigned-byte
// element type (0x08) is supported; values come back as doubles in [0,255].
struct IdxData {
  Tensor values;
  std::size_t items = 0;  // leading dimension
};
IdxData read_idx(const std::string& path);

// Fixture/helper writer for unsigned-byte IDX files; values are rounded
// and clamped into [0,255].
void write_idx_u8(const Tensor& values, const std::string& path);

enum class NormMode { Mnist, Signed };

struct Normalization {
  NormMode mode = NormMode::Mnist;
  double mean = 0.1037;  // applied in Mnist mode only
  double stddev = 0.3081;
};

// Input pixels in [0,1]. Mnist: (x - mean) / std. Signed: 2x - 1.
Tensor normalize(const Tensor& images, const Normalization& norm);
// Exact inverse, back to the [0,1] pixel scale.
Tensor denormalize(const Tensor& images, const Normalization& norm);

}  // namespace hcrbound

#pragma once

#include <cstdint>
#include <vector>

#include "hcrbound/tensor.hpp"

namespace hcrbound {

// Counter-based pseudorandom stream. A stream is a pure function of
// (seed, stream_id, counter), so identical parameters reproduce identical
// sequences across runs and platforms, and distinct stream_ids give
// independent streams without any sequencing between them.
//
// Each normal variate consumes exactly two counter draws (fixed-draw
// Box-Muller), so parallel consumers stay aligned.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::uint64_t counter = 0;

  RngStream() = default;
  RngStream(std::uint64_t seed_, std::uint64_t stream_id_)
      : seed(seed_), stream_id(stream_id_) {}

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double next_uniform();
  double next_normal();

  // Derive an independent substream; the parent stream is unaffected.
  RngStream substream(std::uint64_t id) const;
};

Tensor sample_normal(RngStream& rng, std::vector<std::size_t> shape,
                     double sigma);
Tensor sample_rademacher(RngStream& rng, std::vector<std::size_t> shape);

}  // namespace hcrbound

#include "hcrbound/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hcrbound {

namespace {

// SplitMix64 finalizer; full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RngStream::next_u64() {
  std::uint64_t key = mix64(mix64(seed) ^ (stream_id * 0xda942042e4dd58b5ULL));
  return mix64(key ^ mix64(counter++ * 0xd1342543de82ef95ULL));
}

double RngStream::next_uniform() {
  // 53-bit mantissa, offset half an ulp so the value is strictly inside (0,1).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::next_normal() {
  double u1 = next_uniform();
  double u2 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

RngStream RngStream::substream(std::uint64_t id) const {
  return RngStream(mix64(seed ^ mix64(stream_id)), id);
}

Tensor sample_normal(RngStream& rng, std::vector<std::size_t> shape,
                     double sigma) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("sample_normal: sigma must be positive");
  Tensor out(std::move(shape));
  for (double& x : out.data) x = sigma * rng.next_normal();
  return out;
}

Tensor sample_rademacher(RngStream& rng, std::vector<std::size_t> shape) {
  Tensor out(std::move(shape));
  for (double& x : out.data) x = (rng.next_u64() & 1u) ? 1.0 : -1.0;
  return out;
}

}  // namespace hcrbound

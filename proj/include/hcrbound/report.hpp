#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hcrbound/rng.hpp"
#include "hcrbound/tensor.hpp"

namespace hcrbound {

struct Histogram {
  std::vector<double> bin_edges;  // counts.size() + 1, strictly increasing
  std::vector<std::size_t> counts;
  std::size_t total = 0;
};

// Equal-width bins over [min, max]; the maximum lands in the last bin.
Histogram histogram(const std::vector<double>& values, std::size_t bins);

void write_histogram_csv(const Histogram& h, const std::string& path);

// The bound-visualization recipe: perturb the DCT modes of the normalized
// image by Rademacher signs times the per-mode bounds, invert the DCT,
// undo the normalization and clip into [0,1].
Tensor rademacher_visualize(const Tensor& normalized_image,
                            const Tensor& bounds, RngStream& rng,
                            const std::function<Tensor(const Tensor&)>& denormalizer);

enum class ImageFormat { Pgm, Ppm };

// Binary P5/P6 with maxval 255; pixels must already lie in [0,1].
void write_image(const Tensor& image, const std::string& path,
                 ImageFormat format);

}  // namespace hcrbound

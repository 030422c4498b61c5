#include "hcrbound/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "hcrbound/dct.hpp"

namespace hcrbound {

Histogram histogram(const std::vector<double>& values, std::size_t bins) {
  if (values.empty())
    throw std::invalid_argument("histogram: empty input");
  if (bins == 0)
    throw std::invalid_argument("histogram: need at least one bin");
  for (double v : values)
    if (!std::isfinite(v))
      throw std::invalid_argument("histogram: non-finite value");

  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) hi = lo + 1.0;  // degenerate range: one unit-wide bin span

  Histogram h;
  h.counts.assign(bins, 0);
  h.bin_edges.resize(bins + 1);
  double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i)
    h.bin_edges[i] = lo + width * static_cast<double>(i);
  h.bin_edges[bins] = hi;

  for (double v : values) {
    auto idx = static_cast<std::size_t>((v - lo) / width);
    if (idx >= bins) idx = bins - 1;
    ++h.counts[idx];
  }
  h.total = values.size();
  return h;
}

void write_histogram_csv(const Histogram& h, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_histogram_csv: cannot open " + path);
  os << "bin_left,bin_right,count\n";
  os.precision(17);
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    os << h.bin_edges[i] << ',' << h.bin_edges[i + 1] << ',' << h.counts[i]
       << '\n';
  if (!os) throw std::runtime_error("write_histogram_csv: write failure");
}

Tensor rademacher_visualize(
    const Tensor& normalized_image, const Tensor& bounds, RngStream& rng,
    const std::function<Tensor(const Tensor&)>& denormalizer) {
  if (!normalized_image.same_shape(bounds))
    throw std::invalid_argument("rademacher_visualize: shape mismatch");
  Tensor coeffs = dct2(normalized_image);
  Tensor signs = sample_rademacher(rng, bounds.shape);
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    coeffs[i] += signs[i] * bounds[i];
  Tensor img = denormalizer(idct2(coeffs));
  for (double& v : img.data) v = std::clamp(v, 0.0, 1.0);
  return img;
}

void write_image(const Tensor& image, const std::string& path,
                 ImageFormat format) {
  if (image.shape.size() != 3)
    throw std::invalid_argument("write_image: expected (C,H,W) image");
  std::size_t C = image.shape[0], H = image.shape[1], W = image.shape[2];
  if ((format == ImageFormat::Pgm && C != 1) ||
      (format == ImageFormat::Ppm && C != 3))
    throw std::invalid_argument("write_image: channel count does not match format");

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_image: cannot open " + path);
  os << (format == ImageFormat::Pgm ? "P5" : "P6") << "\n"
     << W << " " << H << "\n255\n";
  std::vector<unsigned char> row(C * W);
  for (std::size_t y = 0; y < H; ++y) {
    for (std::size_t x = 0; x < W; ++x)
      for (std::size_t c = 0; c < C; ++c) {
        double v = image[(c * H + y) * W + x];
        if (v < 0.0 || v > 1.0)
          throw std::invalid_argument("write_image: pixel outside [0,1]");
        row[x * C + c] = static_cast<unsigned char>(std::lround(255.0 * v));
      }
    os.write(reinterpret_cast<const char*>(row.data()),
             static_cast<std::streamsize>(row.size()));
  }
  if (!os) throw std::runtime_error("write_image: write failure on " + path);
}

}  // namespace hcrbound

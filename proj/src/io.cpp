#include "hcrbound/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace hcrbound {

namespace {

std::uint32_t get_be32(std::istream& is, const std::string& path) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4))
    throw std::runtime_error("read_idx: truncated header in " + path);
  return (static_cast<std::uint32_t>(b[0]) << 24) |
         (static_cast<std::uint32_t>(b[1]) << 16) |
         (static_cast<std::uint32_t>(b[2]) << 8) | b[3];
}

}  // namespace

IdxData read_idx(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_idx: cannot open " + path);
  unsigned char magic[4];
  if (!is.read(reinterpret_cast<char*>(magic), 4))
    throw std::runtime_error("read_idx: truncated magic in " + path);
  if (magic[0] != 0 || magic[1] != 0)
    throw std::runtime_error("read_idx: bad magic in " + path);
  if (magic[2] != 0x08)
    throw std::runtime_error("read_idx: unsupported element type 0x" +
                             std::to_string(magic[2]) + " in " + path);
  std::size_t ndims = magic[3];
  if (ndims == 0) throw std::runtime_error("read_idx: zero dimensions");
  std::vector<std::size_t> shape(ndims);
  for (auto& d : shape) d = get_be32(is, path);

  std::size_t count = shape_numel(shape);
  std::vector<unsigned char> raw(count);
  if (!is.read(reinterpret_cast<char*>(raw.data()),
               static_cast<std::streamsize>(count)))
    throw std::runtime_error("read_idx: truncated payload in " + path);

  IdxData out;
  out.items = shape[0];
  out.values = Tensor(shape);
  for (std::size_t i = 0; i < count; ++i)
    out.values[i] = static_cast<double>(raw[i]);
  return out;
}

void write_idx_u8(const Tensor& values, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_idx_u8: cannot open " + path);
  unsigned char magic[4] = {0, 0, 0x08,
                            static_cast<unsigned char>(values.shape.size())};
  os.write(reinterpret_cast<const char*>(magic), 4);
  for (std::size_t d : values.shape) {
    unsigned char b[4] = {static_cast<unsigned char>(d >> 24),
                          static_cast<unsigned char>(d >> 16),
                          static_cast<unsigned char>(d >> 8),
                          static_cast<unsigned char>(d)};
    os.write(reinterpret_cast<const char*>(b), 4);
  }
  for (double v : values.data) {
    auto byte = static_cast<unsigned char>(
        std::clamp(std::lround(v), 0L, 255L));
    os.write(reinterpret_cast<const char*>(&byte), 1);
  }
  if (!os) throw std::runtime_error("write_idx_u8: write failure on " + path);
}

Tensor normalize(const Tensor& images, const Normalization& norm) {
  Tensor out = images;
  if (norm.mode == NormMode::Mnist) {
    for (double& v : out.data) v = (v - norm.mean) / norm.stddev;
  } else {
    for (double& v : out.data) v = 2.0 * v - 1.0;
  }
  return out;
}

Tensor denormalize(const Tensor& images, const Normalization& norm) {
  Tensor out = images;
  if (norm.mode == NormMode::Mnist) {
    for (double& v : out.data) v = v * norm.stddev + norm.mean;
  } else {
    for (double& v : out.data) v = (v + 1.0) / 2.0;
  }
  return out;
}

}  // namespace hcrbound

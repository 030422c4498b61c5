#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hcrbound {

// Dense row-major tensor of doubles. Shapes are immutable after
// construction; all public operations must leave every entry finite.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s);
  Tensor(std::vector<std::size_t> s, std::vector<double> d);

  std::size_t size() const { return data.size(); }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
};

std::size_t shape_numel(const std::vector<std::size_t>& shape);
std::string shape_str(const std::vector<std::size_t>& shape);

Tensor zeros(std::vector<std::size_t> shape);
Tensor from_data(std::vector<std::size_t> shape, std::vector<double> data);

double euclidean_norm(const Tensor& v);
double dot(const Tensor& u, const Tensor& v);

// y += alpha * x
void axpy(double alpha, const Tensor& x, Tensor& y);
Tensor scale(const Tensor& v, double c);
Tensor add(const Tensor& u, const Tensor& v);
Tensor sub(const Tensor& u, const Tensor& v);
Tensor reshape(const Tensor& v, std::vector<std::size_t> new_shape);

bool all_finite(const Tensor& v);
void require_finite(const Tensor& v, const char* what);

}  // namespace hcrbound

#include "hcrbound/tensor.hpp"

#include <cmath>
#include <sstream>

namespace hcrbound {

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_str(const std::vector<std::size_t>& shape) {
  std::ostringstream oss;
  oss << "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) oss << ",";
    oss << shape[i];
  }
  oss << ")";
  return oss.str();
}

Tensor::Tensor(std::vector<std::size_t> s)
    : shape(std::move(s)), data(shape_numel(shape), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> s, std::vector<double> d)
    : shape(std::move(s)), data(std::move(d)) {
  if (data.size() != shape_numel(shape))
    throw std::invalid_argument("Tensor: data length " +
                                std::to_string(data.size()) +
                                " does not match shape " + shape_str(shape));
}

Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }

Tensor from_data(std::vector<std::size_t> shape, std::vector<double> data) {
  return Tensor(std::move(shape), std::move(data));
}

double euclidean_norm(const Tensor& v) {
  // Scaled accumulation keeps this safe against overflow for large entries.
  double scale = 0.0, ssq = 1.0;
  for (double x : v.data) {
    if (x == 0.0) continue;
    double ax = std::fabs(x);
    if (scale < ax) {
      ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
      scale = ax;
    } else {
      ssq += (ax / scale) * (ax / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

double dot(const Tensor& u, const Tensor& v) {
  if (u.size() != v.size())
    throw std::invalid_argument("dot: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return acc;
}

void axpy(double alpha, const Tensor& x, Tensor& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Tensor scale(const Tensor& v, double c) {
  Tensor out = v;
  for (double& x : out.data) x *= c;
  return out;
}

Tensor add(const Tensor& u, const Tensor& v) {
  if (!u.same_shape(v))
    throw std::invalid_argument("add: shape mismatch");
  Tensor out = u;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] += v[i];
  return out;
}

Tensor sub(const Tensor& u, const Tensor& v) {
  if (!u.same_shape(v))
    throw std::invalid_argument("sub: shape mismatch");
  Tensor out = u;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] -= v[i];
  return out;
}

Tensor reshape(const Tensor& v, std::vector<std::size_t> new_shape) {
  if (shape_numel(new_shape) != v.size())
    throw std::invalid_argument("reshape: element count mismatch, " +
                                shape_str(v.shape) + " -> " +
                                shape_str(new_shape));
  return Tensor(std::move(new_shape), v.data);
}

bool all_finite(const Tensor& v) {
  for (double x : v.data)
    if (!std::isfinite(x)) return false;
  return true;
}

void require_finite(const Tensor& v, const char* what) {
  if (!all_finite(v))
    throw std::runtime_error(std::string("non-finite values in ") + what);
}

}  // namespace hcrbound

#pragma once

#include <functional>
#include <string>

#include "hcrbound/tensor.hpp"

namespace hcrbound {

// Matrix-free linear operator: apply maps R^cols -> R^rows, apply_transpose
// the reverse. The pair must satisfy the adjoint identity
// <u, A v> == <A^T u, v>.
struct LinearOperatorContract {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::function<Tensor(const Tensor&)> apply;
  std::function<Tensor(const Tensor&)> apply_transpose;
};

struct LsqrConfig {
  std::size_t max_iterations = 0;  // 0 means 2*min(rows, cols)
  double atol = 1e-10;
  double btol = 1e-10;
};

enum class LsqrStop {
  ExactSolution,   // residual negligible (S1 with zero residual)
  Tolerance,       // Paige-Saunders S1/S2 criteria met
  MaxIterations,
  Breakdown,       // bidiagonalization produced a zero vector
};

struct LsqrResult {
  Tensor x;
  std::size_t iterations = 0;
  double residual_norm = 0.0;
  LsqrStop stop = LsqrStop::MaxIterations;
};

std::string to_string(LsqrStop stop);

// Golub-Kahan bidiagonalization LSQR minimizing ||A x - b||.
LsqrResult lsqr_solve(const LinearOperatorContract& op, const Tensor& b,
                      const LsqrConfig& config = {});

}  // namespace hcrbound

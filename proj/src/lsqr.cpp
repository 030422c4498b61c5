#include "hcrbound/lsqr.hpp"

#include <cmath>
#include <stdexcept>

namespace hcrbound {

std::string to_string(LsqrStop stop) {
  switch (stop) {
    case LsqrStop::ExactSolution: return "exact";
    case LsqrStop::Tolerance: return "tolerance";
    case LsqrStop::MaxIterations: return "max_iterations";
    case LsqrStop::Breakdown: return "breakdown";
  }
  return "?";
}

LsqrResult lsqr_solve(const LinearOperatorContract& op, const Tensor& b,
                      const LsqrConfig& config) {
  if (b.size() != op.rows)
    throw std::invalid_argument("lsqr_solve: b has dimension " +
                                std::to_string(b.size()) + ", operator has " +
                                std::to_string(op.rows) + " rows");
  require_finite(b, "lsqr rhs");

  std::size_t maxit = config.max_iterations
                          ? config.max_iterations
                          : 2 * std::min(op.rows, op.cols);

  LsqrResult res;
  res.x = zeros({op.cols});

  Tensor u = b;
  double beta = euclidean_norm(u);
  double bnorm = beta;
  if (beta == 0.0) {
    res.stop = LsqrStop::ExactSolution;
    return res;
  }
  for (double& e : u.data) e /= beta;

  Tensor v = op.apply_transpose(u);
  double alpha = euclidean_norm(v);
  if (alpha == 0.0) {
    // b is orthogonal to the range of A; x = 0 is the least-squares solution.
    res.residual_norm = beta;
    res.stop = LsqrStop::Breakdown;
    return res;
  }
  for (double& e : v.data) e /= alpha;

  Tensor w = v;
  double phibar = beta;
  double rhobar = alpha;
  double anorm2 = alpha * alpha;

  for (std::size_t k = 1; k <= maxit; ++k) {
    // Next bidiagonalization step.
    Tensor Av = op.apply(v);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = Av[i] - alpha * u[i];
    beta = euclidean_norm(u);
    if (beta > 0.0)
      for (double& e : u.data) e /= beta;

    anorm2 += beta * beta;

    // Apply the next plane rotation of the QR factorization.
    double rho = std::hypot(rhobar, beta);
    double c = rhobar / rho;
    double s = beta / rho;
    double phi = c * phibar;
    phibar = s * phibar;
    double theta = 0.0;

    axpy(phi / rho, w, res.x);
    res.iterations = k;
    res.residual_norm = phibar;
    require_finite(res.x, "lsqr iterate");

    if (beta == 0.0) {
      res.stop = LsqrStop::Breakdown;
      return res;
    }

    Tensor Atu = op.apply_transpose(u);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = Atu[i] - beta * v[i];
    alpha = euclidean_norm(v);
    if (alpha > 0.0)
      for (double& e : v.data) e /= alpha;

    theta = s * alpha;
    rhobar = -c * alpha;
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] = v[i] - (theta / rho) * w[i];

    anorm2 += alpha * alpha;
    double anorm = std::sqrt(anorm2);
    double xnorm = euclidean_norm(res.x);
    double arnorm = phibar * alpha * std::fabs(c);

    if (phibar <= 1e-15 * bnorm) {
      res.stop = LsqrStop::ExactSolution;
      return res;
    }
    // S1: compatible-system test.
    if (phibar <= config.btol * bnorm + config.atol * anorm * xnorm) {
      res.stop = LsqrStop::Tolerance;
      return res;
    }
    // S2: least-squares test on ||A^T r||.
    if (arnorm <= config.atol * anorm * phibar) {
      res.stop = LsqrStop::Tolerance;
      return res;
    }
    if (alpha == 0.0) {
      res.stop = LsqrStop::Breakdown;
      return res;
    }
  }
  res.stop = LsqrStop::MaxIterations;
  return res;
}

}  // namespace hcrbound

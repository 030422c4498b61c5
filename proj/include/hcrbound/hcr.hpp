#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hcrbound/lsqr.hpp"
#include "hcrbound/nn.hpp"
#include "hcrbound/rng.hpp"
#include "hcrbound/tensor.hpp"

namespace hcrbound {

// Additive noise law for dithering. Gaussian iid has a closed-form
// denominator; a custom law supplies a sampler and the density ratio
// f(z - shift) / f(z).
struct NoiseModel {
  bool gaussian = true;
  double sigma = 1.0;
  std::size_t dim = 0;  // custom only
  std::function<Tensor(RngStream&)> sampler;
  std::function<double(const Tensor& z, const Tensor& shift)> density_ratio;

  static NoiseModel gaussian_iid(double sigma);
  static NoiseModel custom(
      std::size_t dim, std::function<Tensor(RngStream&)> sampler,
      std::function<double(const Tensor&, const Tensor&)> density_ratio);

  Tensor sample(RngStream& rng, const std::vector<std::size_t>& shape) const;
  double ratio(const Tensor& z, const Tensor& shift) const;
};

// Result of the iterated minimum-gain perturbation search. z_epsilon is
// always the recomputed forward(theta+epsilon) - forward(theta), never the
// linearized product.
struct PerturbationOutcome {
  Tensor epsilon;
  Tensor z_epsilon;
  double norm_epsilon = 0.0;
  double norm_z = 0.0;
  double gain_ratio = 0.0;  // norm_z / norm_epsilon
  std::vector<double> gain_trace;
};

PerturbationOutcome algorithm1(std::span<const Layer> model_prefix,
                               const Tensor& theta, const Tensor& z0,
                               std::size_t repetitions,
                               const LsqrConfig& lsqr_config = {});

// Closed-form Gaussian denominator expm1((||z||/sigma)^2). Saturated means
// the exponent would overflow; the corresponding bound is vacuously 0.
struct Denominator {
  double value = 0.0;
  bool saturated = false;
};
Denominator gaussian_denominator(double z_norm, double sigma);

struct McEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};
McEstimate mc_denominator(const NoiseModel& noise, const Tensor& z_epsilon,
                          std::size_t samples, RngStream& rng);

double hcr_std_bound(double epsilon_k, double denominator);
double mse_bound(const Tensor& epsilon, double denominator);

enum class BoundBasis { Pixel, Dct };

struct BoundReport {
  BoundBasis basis = BoundBasis::Pixel;
  Tensor std_lower_bounds;  // shaped like theta (per coordinate / DCT mode)
  std::size_t trials = 0;
  std::size_t saturated_trials = 0;
  double perturbation_size = 0.0;  // s
  double sigma = 0.0;
  std::vector<double> trial_denominators;
};

// The 25-trial protocol: i.i.d. starting vectors z0 with N(0,1) entries
// scaled by s/sqrt(n), Algorithm 1 per trial, per-coordinate max of
// |eps_k| / sqrt(denominator) in the requested basis. Trial t draws from
// the stream (rng.seed, rng.stream_id + t).
BoundReport per_mode_bounds(std::span<const Layer> model_prefix,
                            const Tensor& theta, double sigma, double s,
                            std::size_t trials, std::size_t repetitions,
                            const RngStream& rng, BoundBasis basis,
                            const LsqrConfig& lsqr_config = {});

struct CramerRaoBound {
  std::size_t coordinate = 0;
  double value = 0.0;
  bool unbounded = false;  // zero Jacobian column
};
std::vector<CramerRaoBound> cramer_rao_bounds(
    std::span<const Layer> model_prefix, const Tensor& theta, double sigma,
    const std::vector<std::size_t>& coordinates);

void write_bound_csv(const BoundReport& report, const std::string& path);

}  // namespace hcrbound

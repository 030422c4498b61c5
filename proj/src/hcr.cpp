#include "hcrbound/hcr.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "hcrbound/dct.hpp"

namespace hcrbound {

NoiseModel NoiseModel::gaussian_iid(double sigma) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("NoiseModel: sigma must be positive");
  NoiseModel m;
  m.gaussian = true;
  m.sigma = sigma;
  return m;
}

NoiseModel NoiseModel::custom(
    std::size_t dim, std::function<Tensor(RngStream&)> sampler,
    std::function<double(const Tensor&, const Tensor&)> density_ratio) {
  NoiseModel m;
  m.gaussian = false;
  m.dim = dim;
  m.sampler = std::move(sampler);
  m.density_ratio = std::move(density_ratio);
  return m;
}

Tensor NoiseModel::sample(RngStream& rng,
                          const std::vector<std::size_t>& shape) const {
  if (gaussian) return sample_normal(rng, shape, sigma);
  Tensor z = sampler(rng);
  if (z.size() != shape_numel(shape))
    throw std::runtime_error("NoiseModel: custom sampler dimension mismatch");
  return reshape(z, shape);
}

double NoiseModel::ratio(const Tensor& z, const Tensor& shift) const {
  if (gaussian) {
    // f(z - shift) / f(z) = exp((2 <z, shift> - ||shift||^2) / (2 sigma^2))
    double sn = euclidean_norm(shift);
    return std::exp((2.0 * dot(z, shift) - sn * sn) / (2.0 * sigma * sigma));
  }
  return density_ratio(z, shift);
}

PerturbationOutcome algorithm1(std::span<const Layer> model_prefix,
                               const Tensor& theta, const Tensor& z0,
                               std::size_t repetitions,
                               const LsqrConfig& lsqr_config) {
  if (repetitions < 1)
    throw std::invalid_argument("algorithm1: repetitions must be >= 1");
  double z0_norm = euclidean_norm(z0);
  if (z0_norm == 0.0)
    throw std::invalid_argument("algorithm1: starting vector z0 is zero");

  Trace trace = forward_trace(model_prefix, theta);
  const Tensor a_theta = trace.output();
  if (!z0.same_shape(a_theta))
    throw std::invalid_argument("algorithm1: z0 shape " + shape_str(z0.shape) +
                                " does not match features " +
                                shape_str(a_theta.shape));

  LinearOperatorContract op;
  op.rows = a_theta.size();
  op.cols = theta.size();
  op.apply = [&](const Tensor& v) {
    return reshape(jvp(model_prefix, trace, reshape(v, theta.shape)),
                   {a_theta.size()});
  };
  op.apply_transpose = [&](const Tensor& u) {
    return reshape(vjp(model_prefix, trace, reshape(u, a_theta.shape)),
                   {theta.size()});
  };

  // Transposed operator for advancing the iterate: each repetition applies
  // the pseudoinverse twice (once through J, once through J^T), which is an
  // inverse power iteration driving epsilon toward the least singular
  // direction of the Jacobian, the minimizer of ||z_eps|| / ||eps||.
  LinearOperatorContract op_t;
  op_t.rows = op.cols;
  op_t.cols = op.rows;
  op_t.apply = op.apply_transpose;
  op_t.apply_transpose = op.apply;

  PerturbationOutcome out;
  Tensor iterate = reshape(z0, {z0.size()});
  for (std::size_t j = 1; j <= repetitions; ++j) {
    double zn = euclidean_norm(iterate);
    if (zn == 0.0)
      throw std::runtime_error(
          "algorithm1: search iterate collapsed to zero at repetition " +
          std::to_string(j));
    Tensor ztilde = scale(iterate, z0_norm / zn);
    LsqrResult sol = lsqr_solve(op, ztilde, lsqr_config);
    double en = euclidean_norm(sol.x);
    if (en == 0.0)
      throw std::runtime_error(
          "algorithm1: LSQR returned a zero perturbation (degenerate Jacobian)");
    Tensor eps = reshape(sol.x, theta.shape);
    Tensor a_pert = forward(model_prefix, add(theta, eps));
    Tensor z = sub(a_pert, a_theta);
    require_finite(z, "algorithm1 z");
    out.norm_z = euclidean_norm(z);
    if (out.norm_z == 0.0)
      throw std::runtime_error(
          "algorithm1: feature perturbation collapsed to zero at repetition " +
          std::to_string(j));
    out.epsilon = std::move(eps);
    out.z_epsilon = std::move(z);
    out.norm_epsilon = en;
    out.gain_trace.push_back(out.norm_z / en);
    if (j < repetitions) {
      LsqrResult back = lsqr_solve(op_t, sol.x, lsqr_config);
      if (euclidean_norm(back.x) == 0.0)
        throw std::runtime_error(
            "algorithm1: transpose solve collapsed (degenerate Jacobian)");
      iterate = std::move(back.x);
    }
  }
  out.gain_ratio = out.gain_trace.back();
  return out;
}

Denominator gaussian_denominator(double z_norm, double sigma) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("gaussian_denominator: sigma must be positive");
  if (z_norm < 0.0)
    throw std::invalid_argument("gaussian_denominator: negative norm");
  double c = z_norm / sigma;
  if (c * c > 700.0) return {0.0, true};
  return {std::expm1(c * c), false};
}

McEstimate mc_denominator(const NoiseModel& noise, const Tensor& z_epsilon,
                          std::size_t samples, RngStream& rng) {
  if (samples < 100)
    throw std::invalid_argument("mc_denominator: need at least 100 samples");
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    Tensor z = noise.sample(rng, z_epsilon.shape);
    double r = noise.ratio(z, z_epsilon);
    if (!std::isfinite(r))
      throw std::runtime_error("mc_denominator: non-finite density ratio");
    double term = (r - 1.0) * (r - 1.0);
    sum += term;
    sumsq += term * term;
  }
  double n = static_cast<double>(samples);
  double mean = sum / n;
  double var = std::max(0.0, sumsq / n - mean * mean) * n / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

double hcr_std_bound(double epsilon_k, double denominator) {
  if (!(denominator > 0.0))
    throw std::invalid_argument("hcr_std_bound: denominator must be positive");
  return std::fabs(epsilon_k) / std::sqrt(denominator);
}

double mse_bound(const Tensor& epsilon, double denominator) {
  if (!(denominator > 0.0))
    throw std::invalid_argument("mse_bound: denominator must be positive");
  double ss = 0.0;
  for (double e : epsilon.data) ss += e * e;
  return ss / (static_cast<double>(epsilon.size()) * denominator);
}

BoundReport per_mode_bounds(std::span<const Layer> model_prefix,
                            const Tensor& theta, double sigma, double s,
                            std::size_t trials, std::size_t repetitions,
                            const RngStream& rng, BoundBasis basis,
                            const LsqrConfig& lsqr_config) {
  if (!(s > 0.0))
    throw std::invalid_argument("per_mode_bounds: s must be positive");
  if (trials < 1)
    throw std::invalid_argument("per_mode_bounds: trials must be >= 1");
  if (basis == BoundBasis::Dct && theta.shape.size() != 3)
    throw std::invalid_argument(
        "per_mode_bounds: dct basis needs (C,H,W) input, got " +
        shape_str(theta.shape));

  Tensor features = forward(model_prefix, theta);
  std::size_t n = features.size();
  double z0_scale = s / std::sqrt(static_cast<double>(n));

  BoundReport report;
  report.basis = basis;
  report.trials = trials;
  report.perturbation_size = s;
  report.sigma = sigma;
  report.std_lower_bounds = zeros(theta.shape);

  for (std::size_t t = 0; t < trials; ++t) {
    RngStream trial_rng(rng.seed, rng.stream_id + t);
    Tensor z0 = sample_normal(trial_rng, features.shape, 1.0);
    for (double& v : z0.data) v *= z0_scale;
    PerturbationOutcome outcome =
        algorithm1(model_prefix, theta, z0, repetitions, lsqr_config);
    Denominator d = gaussian_denominator(outcome.norm_z, sigma);
    report.trial_denominators.push_back(d.value);
    if (d.saturated) {
      ++report.saturated_trials;
      continue;
    }
    Tensor eps_hat = basis == BoundBasis::Dct ? dct2(outcome.epsilon)
                                              : outcome.epsilon;
    double root = std::sqrt(d.value);
    for (std::size_t k = 0; k < eps_hat.size(); ++k) {
      double b = std::fabs(eps_hat[k]) / root;
      if (b > report.std_lower_bounds[k]) report.std_lower_bounds[k] = b;
    }
  }
  return report;
}

std::vector<CramerRaoBound> cramer_rao_bounds(
    std::span<const Layer> model_prefix, const Tensor& theta, double sigma,
    const std::vector<std::size_t>& coordinates) {
  Trace trace = forward_trace(model_prefix, theta);
  std::vector<CramerRaoBound> out;
  out.reserve(coordinates.size());
  for (std::size_t k : coordinates) {
    if (k >= theta.size())
      throw std::invalid_argument("cramer_rao_bounds: coordinate " +
                                  std::to_string(k) + " out of range");
    Tensor ek = zeros(theta.shape);
    ek[k] = 1.0;
    Tensor col = jvp(model_prefix, trace, ek);
    double ss = 0.0;
    for (double v : col.data) ss += v * v;
    CramerRaoBound b;
    b.coordinate = k;
    if (ss == 0.0) {
      b.unbounded = true;
      b.value = std::numeric_limits<double>::infinity();
    } else {
      b.value = sigma * sigma / ss;
    }
    out.push_back(b);
  }
  return out;
}

void write_bound_csv(const BoundReport& report, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_bound_csv: cannot open " + path);
  os << "index,bound,trials,s,sigma,basis\n";
  const char* basis = report.basis == BoundBasis::Dct ? "dct" : "pixel";
  os.precision(17);
  for (std::size_t k = 0; k < report.std_lower_bounds.size(); ++k)
    os << k << ',' << report.std_lower_bounds[k] << ',' << report.trials << ','
       << report.perturbation_size << ',' << report.sigma << ',' << basis
       << '\n';
  if (!os) throw std::runtime_error("write_bound_csv: write failure " + path);
}

}  // namespace hcrbound

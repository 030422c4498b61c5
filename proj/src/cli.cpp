#include "hcrbound/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hcrbound/dct.hpp"
#include "hcrbound/hcr.hpp"
#include "hcrbound/report.hpp"

namespace hcrbound {

namespace {

constexpr std::uint64_t kTrialsPerExampleStride = 1000;
constexpr std::uint64_t kEvalNoiseStream = 0x1d17;

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void parse_range(const std::string& v, RunConfig& config) {
  auto pos = v.find("..");
  if (pos == std::string::npos)
    throw std::runtime_error("range must be of the form A..B, got " + v);
  config.range_begin = std::stoull(v.substr(0, pos));
  config.range_end = std::stoull(v.substr(pos + 2));
}

}  // namespace

void parse_config_file(const std::string& path, RunConfig& config) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "train_images") config.train_images = val;
    else if (key == "train_labels") config.train_labels = val;
    else if (key == "test_images") config.test_images = val;
    else if (key == "test_labels") config.test_labels = val;
    else if (key == "weights") config.weights = val;
    else if (key == "out") config.out_dir = val;
    else if (key == "normalization") {
      if (val == "mnist") config.normalization.mode = NormMode::Mnist;
      else if (val == "signed") config.normalization.mode = NormMode::Signed;
      else throw std::runtime_error("normalization must be mnist or signed");
    } else if (key == "mnist_mean") config.normalization.mean = std::stod(val);
    else if (key == "mnist_std") config.normalization.stddev = std::stod(val);
    else if (key == "sigma") config.sigma = std::stod(val);
    else if (key == "size") config.perturbation_size = std::stod(val);
    else if (key == "trials") config.trials = std::stoull(val);
    else if (key == "reps") config.repetitions = std::stoull(val);
    else if (key == "seed") {
      config.seed = std::stoull(val);
      config.train.seed = config.seed;
    } else if (key == "range") parse_range(val, config);
    else if (key == "lowpass") config.lowpass_k = std::stoull(val);
    else if (key == "jobs") config.jobs = std::stoull(val);
    else if (key == "epochs") config.train.epochs = std::stoull(val);
    else if (key == "batch_size") config.train.batch_size = std::stoull(val);
    else if (key == "learning_rate") config.train.learning_rate = std::stod(val);
    else if (key == "weight_decay") config.train.weight_decay = std::stod(val);
    else
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
  }
}

Dataset load_dataset(const std::string& image_path,
                     const std::string& label_path,
                     const Normalization& norm) {
  IdxData images = read_idx(image_path);
  IdxData labels = read_idx(label_path);
  if (images.values.shape.size() < 3)
    throw std::runtime_error("image file must have at least 3 dimensions");
  if (labels.values.shape.size() != 1)
    throw std::runtime_error("label file must be one-dimensional");
  if (images.items != labels.items)
    throw std::runtime_error("image/label count mismatch");

  std::size_t N = images.items;
  std::vector<std::size_t> item_shape;
  if (images.values.shape.size() == 3)
    item_shape = {1, images.values.shape[1], images.values.shape[2]};
  else
    item_shape = {images.values.shape[1], images.values.shape[2],
                  images.values.shape[3]};
  std::size_t item_size = shape_numel(item_shape);

  Dataset ds;
  ds.images.reserve(N);
  ds.labels.reserve(N);
  for (std::size_t i = 0; i < N; ++i) {
    Tensor img(item_shape);
    for (std::size_t j = 0; j < item_size; ++j)
      img[j] = images.values[i * item_size + j] / 255.0;
    ds.images.push_back(normalize(img, norm));
    ds.labels.push_back(static_cast<std::size_t>(labels.values[i]));
  }
  return ds;
}

Model build_mlp_model(std::size_t input_dim, std::size_t classes) {
  Model model;
  model.layers.push_back(Layer::flatten());
  model.layers.push_back(Layer::affine(input_dim, input_dim));
  model.layers.push_back(Layer::relu());
  model.layers.push_back(Layer::affine(input_dim, input_dim));
  model.layers.push_back(Layer::relu());
  model.feature_boundary = model.layers.size();
  model.layers.push_back(Layer::affine(input_dim, classes));
  model.layers.push_back(Layer::softmax());
  return model;
}

namespace {

std::string weights_path(const RunConfig& config) {
  if (!config.weights.empty()) return config.weights;
  return (std::filesystem::path(config.out_dir) / "model.hcrw").string();
}

void print_accuracy(const Model& model, const Dataset& test,
                    const RunConfig& config) {
  RngStream noise_rng(config.seed, kEvalNoiseStream);
  double plain = evaluate_accuracy(model, test, std::nullopt, noise_rng);
  double dithered = evaluate_accuracy(
      model, test, NoiseModel::gaussian_iid(config.sigma), noise_rng);
  std::cout << "test accuracy (undithered): " << 100.0 * plain << "%\n";
  std::cout << "test accuracy (dithered, sigma=" << config.sigma
            << "): " << 100.0 * dithered << "%\n";
}

std::pair<std::size_t, std::size_t> resolve_range(const RunConfig& config,
                                                  std::size_t n) {
  std::size_t begin = config.range_begin;
  std::size_t end = config.range_end == 0 ? n : config.range_end;
  if (begin >= end || end > n)
    throw std::runtime_error("example range " + std::to_string(begin) + ".." +
                             std::to_string(end) + " out of bounds (dataset has " +
                             std::to_string(n) + " examples)");
  return {begin, end};
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

int cmd_train(const RunConfig& config) {
  Dataset train = load_dataset(config.train_images, config.train_labels,
                               config.normalization);
  Dataset test =
      load_dataset(config.test_images, config.test_labels, config.normalization);

  std::size_t classes =
      1 + *std::max_element(train.labels.begin(), train.labels.end());
  Model model = build_mlp_model(train.images.front().size(), classes);
  init_weights(model, config.train.seed);

  std::vector<double> losses = train_model(model, train, config.train);
  for (std::size_t e = 0; e < losses.size(); ++e)
    std::cout << "epoch " << e + 1 << " mean loss " << losses[e] << "\n";

  std::filesystem::create_directories(config.out_dir);
  std::string path = weights_path(config);
  save_weights(model, path);
  std::cout << "weights written to " << path << "\n";
  print_accuracy(model, test, config);
  return 0;
}

int cmd_eval(const RunConfig& config) {
  Model model = load_weights(weights_path(config));
  Dataset test =
      load_dataset(config.test_images, config.test_labels, config.normalization);
  print_accuracy(model, test, config);
  return 0;
}

int cmd_bound(const RunConfig& config) {
  Model model = load_weights(weights_path(config));
  Dataset test =
      load_dataset(config.test_images, config.test_labels, config.normalization);
  auto [begin, end] = resolve_range(config, test.size());
  std::size_t count = end - begin;

  std::vector<BoundReport> reports(count);
  std::size_t jobs = std::max<std::size_t>(1, config.jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= count) return;
      std::size_t ex = begin + idx;
      RngStream rng(config.seed, ex * kTrialsPerExampleStride);
      reports[idx] = per_mode_bounds(
          model.feature_prefix(), test.images[ex], config.sigma,
          config.perturbation_size, config.trials, config.repetitions, rng,
          BoundBasis::Dct);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::filesystem::create_directories(config.out_dir);
  std::filesystem::path out(config.out_dir);
  std::ofstream full(out / "bounds_full.csv");
  std::ofstream low(out / "bounds_lowpass.csv");
  if (!full || !low) throw std::runtime_error("cannot open output CSVs");
  const char* header = "example,mode,bound,trials,s,sigma,basis\n";
  full << header;
  low << header;
  full.precision(17);
  low.precision(17);

  std::vector<double> all_full, all_low;
  for (std::size_t idx = 0; idx < count; ++idx) {
    const BoundReport& r = reports[idx];
    std::size_t ex = begin + idx;
    const auto& shape = r.std_lower_bounds.shape;
    std::size_t H = shape[1], W = shape[2];
    for (std::size_t k = 0; k < r.std_lower_bounds.size(); ++k) {
      double b = r.std_lower_bounds[k];
      full << ex << ',' << k << ',' << b << ',' << r.trials << ','
           << r.perturbation_size << ',' << r.sigma << ",dct\n";
      all_full.push_back(b);
      std::size_t row = (k / W) % H, col = k % W;
      if (row < config.lowpass_k && col < config.lowpass_k) {
        low << ex << ',' << k << ',' << b << ',' << r.trials << ','
            << r.perturbation_size << ',' << r.sigma << ",dct\n";
        all_low.push_back(b);
      }
    }
  }
  full.close();
  low.close();

  write_histogram_csv(histogram(all_full, 50), (out / "hist_full.csv").string());
  write_histogram_csv(histogram(all_low, 50),
                      (out / "hist_lowpass.csv").string());

  std::cout << "examples " << begin << ".." << end << ", s="
            << config.perturbation_size << ", trials=" << config.trials
            << "\n";
  std::cout << "median bound (all modes): " << median(all_full) << "\n";
  std::cout << "median bound (" << config.lowpass_k << "x" << config.lowpass_k
            << " low-pass): " << median(all_low) << "\n";
  return 0;
}

int cmd_viz(const RunConfig& config, std::size_t example_index) {
  Model model = load_weights(weights_path(config));
  Dataset test =
      load_dataset(config.test_images, config.test_labels, config.normalization);
  if (example_index >= test.size())
    throw std::runtime_error("example index out of range");
  const Tensor& theta = test.images[example_index];
  std::size_t channels = theta.shape[0];
  ImageFormat fmt = channels == 3 ? ImageFormat::Ppm : ImageFormat::Pgm;
  const char* ext = channels == 3 ? ".ppm" : ".pgm";

  std::filesystem::create_directories(config.out_dir);
  std::filesystem::path out(config.out_dir);
  auto denorm = [&](const Tensor& t) {
    return denormalize(t, config.normalization);
  };

  {
    Tensor orig = denormalize(theta, config.normalization);
    for (double& v : orig.data) v = std::clamp(v, 0.0, 1.0);
    write_image(orig, (out / ("ex" + std::to_string(example_index) +
                              "_unperturbed" + ext))
                          .string(),
                fmt);
  }

  // The published comparison pairs a near-Cramer-Rao size with a larger one.
  const double sizes[2] = {1.0 / 1000.0, 1.0 / 200.0};
  for (int si = 0; si < 2; ++si) {
    RngStream rng(config.seed, example_index * kTrialsPerExampleStride);
    BoundReport report = per_mode_bounds(
        model.feature_prefix(), theta, config.sigma, sizes[si], config.trials,
        config.repetitions, rng, BoundBasis::Dct);
    RngStream viz_rng(config.seed,
                      example_index * kTrialsPerExampleStride + 500 + si);
    Tensor img = rademacher_visualize(theta, report.std_lower_bounds, viz_rng,
                                      denorm);
    std::string name = "ex" + std::to_string(example_index) + "_s" +
                       std::to_string(static_cast<int>(1.0 / sizes[si])) + ext;
    write_image(img, (out / name).string(), fmt);
  }
  std::cout << "images written to " << config.out_dir << "\n";
  return 0;
}

int cmd_crbound(const RunConfig& config, std::size_t example_index,
                std::vector<std::size_t> coordinates) {
  Model model = load_weights(weights_path(config));
  Dataset test =
      load_dataset(config.test_images, config.test_labels, config.normalization);
  if (example_index >= test.size())
    throw std::runtime_error("example index out of range");
  const Tensor& theta = test.images[example_index];
  if (coordinates.empty()) {
    coordinates.resize(theta.size());
    std::iota(coordinates.begin(), coordinates.end(), 0);
  }
  auto bounds =
      cramer_rao_bounds(model.feature_prefix(), theta, config.sigma, coordinates);

  std::filesystem::create_directories(config.out_dir);
  std::filesystem::path out(config.out_dir);
  std::string path =
      (out / ("crbound_ex" + std::to_string(example_index) + ".csv")).string();
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "coordinate,variance_bound\n";
  os.precision(17);
  for (const auto& b : bounds) {
    if (b.unbounded)
      os << b.coordinate << ",inf\n";
    else
      os << b.coordinate << ',' << b.value << '\n';
  }
  std::cout << "Cramer-Rao bounds written to " << path << "\n";
  return 0;
}

}  // namespace hcrbound

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hcrbound/cli.hpp"

namespace {

void add_common_flags(CLI::App* sub, hcrbound::RunConfig& config,
                      std::string& config_path, std::string& range) {
  sub->add_option("--config", config_path, "key = value config file");
  sub->add_option("--weights", config.weights, "HCRW1 weight file");
  sub->add_option("--sigma", config.sigma, "dithering noise std");
  sub->add_option("--size", config.perturbation_size,
                  "perturbation size s (norm of z_epsilon)");
  sub->add_option("--trials", config.trials, "trials per example");
  sub->add_option("--reps", config.repetitions, "LSQR repetitions i");
  sub->add_option("--seed", config.seed, "master seed");
  sub->add_option("--range", range, "example range A..B");
  sub->add_option("--lowpass", config.lowpass_k, "low-pass cutoff k");
  sub->add_option("--jobs", config.jobs, "worker threads");
  sub->add_option("--out", config.out_dir, "output directory");
  sub->add_option("--train-images", config.train_images, "IDX training images");
  sub->add_option("--train-labels", config.train_labels, "IDX training labels");
  sub->add_option("--test-images", config.test_images, "IDX test images");
  sub->add_option("--test-labels", config.test_labels, "IDX test labels");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HCR lower bounds on reconstructing inputs from dithered "
               "neural-net features"};
  app.require_subcommand(1);

  hcrbound::RunConfig config;
  std::string config_path;
  std::string range;
  std::size_t example_index = 0;
  std::vector<std::size_t> coordinates;

  CLI::App* train = app.add_subcommand("train", "train the MLP and report accuracy");
  CLI::App* eval = app.add_subcommand("eval", "report dithered/undithered accuracy");
  CLI::App* bound = app.add_subcommand(
      "bound", "per-mode HCR bounds over an example range, with histograms");
  CLI::App* viz = app.add_subcommand(
      "viz", "unperturbed/perturbed image triplet for one example");
  CLI::App* crbound =
      app.add_subcommand("crbound", "Cramer-Rao bounds for one example");

  for (CLI::App* sub : {train, eval, bound, viz, crbound})
    add_common_flags(sub, config, config_path, range);
  viz->add_option("--example", example_index, "test example index");
  crbound->add_option("--example", example_index, "test example index");
  crbound->add_option("--coords", coordinates,
                      "coordinate indices (default: all)");

  // Two passes so file values load first and flags override them.
  CLI11_PARSE(app, argc, argv);
  try {
    if (!config_path.empty()) hcrbound::parse_config_file(config_path, config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    app.clear();
    (void)app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  config.train.seed = config.seed;
  if (!range.empty()) {
    auto pos = range.find("..");
    if (pos == std::string::npos) {
      std::cerr << "error: --range must be A..B\n";
      return 1;
    }
    config.range_begin = std::stoull(range.substr(0, pos));
    config.range_end = std::stoull(range.substr(pos + 2));
  }

  try {
    if (*train) return hcrbound::cmd_train(config);
    if (*eval) return hcrbound::cmd_eval(config);
    if (*bound) return hcrbound::cmd_bound(config);
    if (*viz) return hcrbound::cmd_viz(config, example_index);
    if (*crbound)
      return hcrbound::cmd_crbound(config, example_index, coordinates);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

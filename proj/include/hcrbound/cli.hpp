#pragma once

#include <string>
#include <vector>

#include "hcrbound/io.hpp"
#include "hcrbound/train.hpp"

namespace hcrbound {

struct RunConfig {
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
  std::string weights;
  std::string out_dir = ".";

  Normalization normalization;  // mnist by default

  double sigma = 1.0;
  double perturbation_size = 1.0 / 200.0;  // s
  std::size_t trials = 25;
  std::size_t repetitions = 10;  // i
  std::uint64_t seed = 0;
  std::size_t range_begin = 0;
  std::size_t range_end = 0;  // 0 means "whole dataset"
  std::size_t lowpass_k = 8;
  std::size_t jobs = 1;

  TrainConfig train;
};

// Line-oriented `key = value` config; '#' starts a comment. Unknown keys
// are rejected. Flags parsed afterwards override file values.
void parse_config_file(const std::string& path, RunConfig& config);

Dataset load_dataset(const std::string& image_path,
                     const std::string& label_path,
                     const Normalization& norm);

// Build the MNIST-style MLP for (1,H,W) inputs: Flatten, two square Affine
// + ReLU blocks as the feature extractor, Affine + Softmax classifier.
Model build_mlp_model(std::size_t input_dim, std::size_t classes);

int cmd_train(const RunConfig& config);
int cmd_eval(const RunConfig& config);
int cmd_bound(const RunConfig& config);
int cmd_viz(const RunConfig& config, std::size_t example_index);
int cmd_crbound(const RunConfig& config, std::size_t example_index,
                std::vector<std::size_t> coordinates);

}  // namespace hcrbound

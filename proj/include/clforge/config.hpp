#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "clforge/data.hpp"
#include "clforge/loss.hpp"
#include "clforge/prng.hpp"
#include "clforge/trainer.hpp"

namespace clforge {

struct DataConfig {
  std::string kind = "xor";  // xor | mnist
  int d = 50;
  int K = 3;
  int n_train = 1000;
  int n_train_later = 0;  // 0 = same as n_train; overrides tasks k >= 2
  int n_test = 10000;
  double sigma_coeff = 0.1;  // sigma = sigma_coeff / sqrt(d)

  std::string mnist_images;
  std::string mnist_labels;
  std::vector<std::pair<int, int>> mnist_pairs;  // digit pairs, one per task
  bool mnist_normalize = true;
};

struct ModelBlock {
  std::string kind = "finite";  // finite | linearized
  int m = 100;
  std::string activation = "quadratic";
  bool balanced_a = false;
  bool closed_form = false;  // linearized only
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int seeds = 5;
  std::string out_dir = "out";
  std::string loss = "hinge";
  DataConfig data;
  ModelBlock model;
  TrainConfig train;
  std::vector<std::pair<std::string, std::vector<double>>> sweep;  // axis key -> values
  int cell_cap = 4096;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text, const std::string& origin);

/// Serialized echo of the config (for meta.json).
std::string config_to_json(const ExperimentConfig& cfg);

/// Set a sweep axis value by key, e.g. "data.n_train" or "train.eta".
void apply_axis(ExperimentConfig& cfg, const std::string& key, double value);

/// Materialize the task stream for one run.
TaskStream build_task_stream(const ExperimentConfig& cfg, Seed seed);

}  // namespace clforge

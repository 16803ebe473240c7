#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "clforge/prng.hpp"

namespace clforge {

/// One XOR-cluster task: orthogonal, equal-norm mean pair plus isotropic noise.
struct TaskSpec {
  int d = 0;
  Eigen::VectorXd mu_plus;
  Eigen::VectorXd mu_minus;
  double sigma = 0.0;
  int task_index = 1;
};

struct Dataset {
  Eigen::MatrixXd X;   // n x d, one sample per row
  Eigen::VectorXd y;   // +/-1 labels
  int task_index = 1;

  int n() const { return static_cast<int>(X.rows()); }
  int d() const { return static_cast<int>(X.cols()); }
};

struct TaskStream {
  std::vector<TaskSpec> tasks;   // empty for non-synthetic data
  std::vector<Dataset> train;
  std::vector<Dataset> test;
  int d = 0;

  int num_tasks() const { return static_cast<int>(train.size()); }
};

/// mu_plus = (e_{2k-1} + e_{2k})/sqrt(d), mu_minus = (e_{2k-1} - e_{2k})/sqrt(d).
std::pair<Eigen::VectorXd, Eigen::VectorXd> standard_means(int d, int k);

TaskSpec make_task_spec(int d, int k, double sigma);

Dataset sample_xor(const TaskSpec& spec, int n, Stream& stream);

TaskStream build_stream(int d, int K, int n_train, int n_test, double sigma, Stream& stream);

/// Per-task train sizes (Fig. 4 style sweeps where later tasks get more data).
TaskStream build_stream(int d, int K, const std::vector<int>& n_train, int n_test, double sigma,
                        Stream& stream);

/// IDX-format reader: first `n` samples (after skipping `skip` matches) whose
/// label is digit_a or digit_b; y=+1 for digit_a. Pixels to [0,1], then
/// scaled by 1/sqrt(d) when normalize is set.
Dataset load_mnist_pair(const std::string& images_path, const std::string& labels_path,
                        int digit_a, int digit_b, int n, bool normalize, int skip = 0);

}  // namespace clforge

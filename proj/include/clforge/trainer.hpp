#pragma once

#include <Eigen/Dense>
#include <vector>

#include "clforge/data.hpp"
#include "clforge/loss.hpp"
#include "clforge/model.hpp"
#include "clforge/prng.hpp"

namespace clforge {

struct ModelConfig {
  int m = 100;
  Activation act = Activation::quadratic;
  bool balanced_a = false;
};

struct TrainConfig {
  double eta = 1.0;
  int T = 100;
  double lambda = 0.0;   // quadratic tether toward the previous task's weights
  int batch_size = 0;    // 0 = full batch
  int eval_every = 0;    // 0 = log at task boundaries only
};

struct MetricRow {
  int phase_task;   // task being trained when the row was logged
  long iter;        // global iteration index, (k-1)*T + t
  int eval_task;
  bool test_split;
  double loss;
  double err;
};

/// Trajectory of one continual-learning run: boundary weight snapshots
/// w_0..w_K, logged metrics, and the per-step train-loss trace per task.
struct RunRecord {
  Eigen::VectorXd a;
  Activation act = Activation::quadratic;
  std::vector<Eigen::MatrixXd> snapshots;           // K+1 boundary copies of W
  std::vector<MetricRow> metrics;
  std::vector<std::vector<double>> loss_trace;      // loss_trace[k-1][t] = F_hat_k(w_k^(t))

  NetParams snapshot_params(int index) const;
  NetParams final_params() const;
};

/// One GD step on (X, y); returns the pre-step mean loss. `anchor` is the
/// previous task's final weights, required when lambda > 0.
double gd_step(NetParams& params, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               Activation act, const LossFn& loss, double eta, double lambda,
               const Eigen::MatrixXd* anchor);

double gd_step(NetParams& params, const Dataset& data, Activation act, const LossFn& loss,
               double eta, double lambda, const NetParams* anchor);

/// T steps on task k's train set, logging metrics on every task's train and
/// test split at the configured stride.
void train_task(NetParams& params, const TaskStream& ts, int k, const TrainConfig& cfg,
                Activation act, const LossFn& loss, RunRecord& record, Stream& batch_stream);

RunRecord train_stream(const TaskStream& ts, const TrainConfig& cfg, const ModelConfig& model,
                       const LossFn& loss, Seed seed);

/// Same run with sample `sample_index` of task k's train set removed.
NetParams leave_one_out_run(const TaskStream& ts, const TrainConfig& cfg, const ModelConfig& model,
                            const LossFn& loss, Seed seed, int task_k, int sample_index);

}  // namespace clforge

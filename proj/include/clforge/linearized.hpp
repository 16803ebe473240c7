#pragma once

#include <Eigen/Dense>
#include <vector>

#include "clforge/data.hpp"
#include "clforge/loss.hpp"
#include "clforge/model.hpp"
#include "clforge/trainer.hpp"

namespace clforge {

/// Label-weighted second moment (1/n) sum_i y_i x_i x_i^T of one task.
struct SignalMatrix {
  Eigen::MatrixXd A;
  int task_index = 1;
};

SignalMatrix signal_matrix(const Dataset& data);

/// Lazy-regime surrogate: features frozen at init, output affine in the
/// displacement Delta (w = W0 + Delta).
struct LinearizedNet {
  NetParams init_params;
  Eigen::MatrixXd delta;  // m x d
  Activation act = Activation::quadratic;

  int m() const { return init_params.m(); }
  int d() const { return init_params.d(); }

  double output(const Eigen::VectorXd& x) const;
  Eigen::VectorXd batch_outputs(const Eigen::MatrixXd& X) const;
  /// Output displacement from init, i.e. the frozen-feature kernel term only.
  double output_shift(const Eigen::VectorXd& x) const;
};

struct LinearizedRun {
  LinearizedNet net;
  std::vector<Eigen::MatrixXd> delta_snapshots;  // K+1 boundary copies
};

/// Closed-form mode (linear loss only) writes each task's displacement as the
/// cumulative-sum formula; iterative mode runs per-step GD on the surrogate.
LinearizedRun train_linearized(const TaskStream& ts, const TrainConfig& cfg,
                               const ModelConfig& model, const LossFn& loss, Seed seed,
                               bool closed_form);

/// eta*T * x^T (sum_j A_j) x, the deterministic infinite-width signal.
double infinite_width_prediction(const std::vector<SignalMatrix>& signals, double eta, int T,
                                 const Eigen::VectorXd& x);

/// U = (1/n) sum_i y_i (x_i^T x1)^2.
double u_statistic(const Dataset& data, const Eigen::VectorXd& probe_x, double probe_y);

/// Max final-weight discrepancy between regularized linearized CL at step eta
/// and the alpha_T-rescaled unregularized run.
double regularized_equivalence_check(const TaskStream& ts, double eta, int T, double lambda,
                                     Seed seed);

/// Effective step-size factor (1-(1-eta*lambda)^t)/(eta*lambda); t for lambda=0.
double alpha_t(double eta, double lambda, long t);
double alpha_t_approx(double eta, double lambda, long t);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_err = 0.0;
};

/// Monte-Carlo estimate of the NTK margin M(x,y) for the four-region
/// init-dependent witness (quadratic activation).
MonteCarloEstimate ntk_margin_mc(const TaskSpec& spec, const Eigen::VectorXd& x, double y,
                                 long samples, Stream& stream);

}  // namespace clforge

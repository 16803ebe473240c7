#include "clforge/trainer.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "clforge/errors.hpp"
#include "clforge/metrics.hpp"

namespace clforge {

NetParams RunRecord::snapshot_params(int index) const {
  if (index < 0 || index >= static_cast<int>(snapshots.size())) {
    throw MissingSnapshot("snapshot " + std::to_string(index) + " not recorded");
  }
  return NetParams{snapshots[static_cast<std::size_t>(index)], a};
}

NetParams RunRecord::final_params() const {
  if (snapshots.empty()) throw MissingSnapshot("run has no snapshots");
  return NetParams{snapshots.back(), a};
}

double gd_step(NetParams& params, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               Activation act, const LossFn& loss, double eta, double lambda,
               const Eigen::MatrixXd* anchor) {
  if (X.cols() != params.d()) {
    throw DimensionMismatch("gd_step: data dim " + std::to_string(X.cols()) + ", weights dim " +
                            std::to_string(params.d()));
  }
  const int n = static_cast<int>(X.rows());
  const int m = params.m();
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));

  // single n x m workspace: preactivations, then phi' scaled per sample
  Eigen::MatrixXd H = X * params.W.transpose();

  // outputs accumulated column by column to avoid an act_value(H) temporary
  Eigen::VectorXd outputs = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    const double ai = params.a(i) * inv_sqrt_m;
    switch (act) {
      case Activation::quadratic:
        outputs.array() += (0.5 * ai) * H.col(i).array().square();
        break;
      case Activation::relu:
        outputs.array() += ai * H.col(i).array().max(0.0);
        break;
      case Activation::gelu:
        outputs.array() +=
            ai * H.col(i).unaryExpr([](double t) { return act_value(Activation::gelu, t); }).array();
        break;
    }
  }
  const Eigen::VectorXd margins = y.cwiseProduct(outputs);
  auto [mean_loss, dloss] = loss_and_grad(loss, margins);

  // dF/dW = (1/n) sum_j f'(u_j) y_j dPhi/dW(x_j); rows of H become
  // phi'(preactivation) scaled by the per-sample coefficient, columns of the
  // resulting gradient by a_i / sqrt(m).
  if (act != Activation::quadratic) {
    H = H.unaryExpr([act](double t) { return act_deriv(act, t); });
  }
  const Eigen::VectorXd coef = dloss.cwiseProduct(y) / static_cast<double>(n);
  H.array().colwise() *= coef.array();
  Eigen::MatrixXd grad = H.transpose() * X;  // m x d
  grad.array().colwise() *= params.a.array() * inv_sqrt_m;

  if (lambda > 0.0) {
    if (anchor == nullptr) {
      throw ConfigError("gd_step: lambda > 0 requires an anchor");
    }
    grad += lambda * (params.W - *anchor);
  }
  params.W.noalias() -= eta * grad;

  if (!params.W.allFinite()) {
    throw NonFiniteUpdate("gd_step: weights became non-finite (eta=" + std::to_string(eta) + ")");
  }
  return mean_loss;
}

double gd_step(NetParams& params, const Dataset& data, Activation act, const LossFn& loss,
               double eta, double lambda, const NetParams* anchor) {
  return gd_step(params, data.X, data.y, act, loss, eta, lambda,
                 anchor != nullptr ? &anchor->W : nullptr);
}

namespace {

void log_all_tasks(const NetParams& params, const TaskStream& ts, Activation act,
                   const LossFn& loss, int phase_task, long iter, RunRecord& record) {
  for (int j = 1; j <= ts.num_tasks(); ++j) {
    const auto tr = eval_loss(params, ts.train[static_cast<std::size_t>(j - 1)], act, loss);
    record.metrics.push_back({phase_task, iter, j, false, tr.loss, tr.err});
    const auto te = eval_loss(params, ts.test[static_cast<std::size_t>(j - 1)], act, loss);
    record.metrics.push_back({phase_task, iter, j, true, te.loss, te.err});
  }
}

}  // namespace

void train_task(NetParams& params, const TaskStream& ts, int k, const TrainConfig& cfg,
                Activation act, const LossFn& loss, RunRecord& record, Stream& batch_stream) {
  const Dataset& data = ts.train[static_cast<std::size_t>(k - 1)];
  const int n = data.n();
  const long iter_base = static_cast<long>(k - 1) * cfg.T;

  // lambda tethers toward the previous boundary; the first task is unregularized
  const bool regularized = cfg.lambda > 0.0 && k >= 2;
  Eigen::MatrixXd anchor;
  if (regularized) anchor = record.snapshots.back();

  std::vector<int> order;
  int cursor = 0;
  if (cfg.batch_size > 0) {
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
  }

  auto& trace = record.loss_trace.emplace_back();
  trace.reserve(static_cast<std::size_t>(cfg.T));

  for (int t = 0; t < cfg.T; ++t) {
    if (cfg.eval_every > 0 && t % cfg.eval_every == 0) {
      log_all_tasks(params, ts, act, loss, k, iter_base + t, record);
    }
    if (cfg.batch_size > 0 && cfg.batch_size < n) {
      if (cursor + cfg.batch_size > n) cursor = 0;
      if (cursor == 0) {
        // reshuffle at each epoch, task-local stream
        for (int i = n - 1; i > 0; --i) {
          const int j =
              static_cast<int>(batch_stream.next_u64() % static_cast<std::uint64_t>(i + 1));
          std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }
      }
      Eigen::MatrixXd Xb(cfg.batch_size, data.d());
      Eigen::VectorXd yb(cfg.batch_size);
      for (int b = 0; b < cfg.batch_size; ++b) {
        const int row = order[static_cast<std::size_t>(cursor + b)];
        Xb.row(b) = data.X.row(row);
        yb(b) = data.y(row);
      }
      cursor += cfg.batch_size;
      gd_step(params, Xb, yb, act, loss, cfg.eta, regularized ? cfg.lambda : 0.0,
              regularized ? &anchor : nullptr);
      trace.push_back(eval_loss(params, data, act, loss).loss);
    } else {
      const double step_loss = gd_step(params, data.X, data.y, act, loss, cfg.eta,
                                       regularized ? cfg.lambda : 0.0,
                                       regularized ? &anchor : nullptr);
      trace.push_back(step_loss);
    }
  }

  log_all_tasks(params, ts, act, loss, k, iter_base + cfg.T, record);
}

RunRecord train_stream(const TaskStream& ts, const TrainConfig& cfg, const ModelConfig& model,
                       const LossFn& loss, Seed seed) {
  auto init_stream = derive(seed, "init");
  NetParams params = init(model.m, ts.d, init_stream, model.balanced_a);

  RunRecord record;
  record.a = params.a;
  record.act = model.act;
  record.snapshots.push_back(params.W);

  for (int k = 1; k <= ts.num_tasks(); ++k) {
    auto batch_stream = derive(seed, "task/" + std::to_string(k) + "/batch");
    train_task(params, ts, k, cfg, model.act, loss, record, batch_stream);
    record.snapshots.push_back(params.W);
  }
  return record;
}

NetParams leave_one_out_run(const TaskStream& ts, const TrainConfig& cfg, const ModelConfig& model,
                            const LossFn& loss, Seed seed, int task_k, int sample_index) {
  const Dataset& full = ts.train[static_cast<std::size_t>(task_k - 1)];
  if (full.n() < 2) throw ConfigError("leave_one_out_run: need n >= 2");

  TaskStream reduced = ts;
  Dataset& data = reduced.train[static_cast<std::size_t>(task_k - 1)];
  Dataset cut;
  cut.task_index = data.task_index;
  cut.X.resize(data.n() - 1, data.d());
  cut.y.resize(data.n() - 1);
  int out = 0;
  for (int i = 0; i < data.n(); ++i) {
    if (i == sample_index) continue;
    cut.X.row(out) = data.X.row(i);
    cut.y(out) = data.y(i);
    ++out;
  }
  data = std::move(cut);

  return train_stream(reduced, cfg, model, loss, seed).final_params();
}

}  // namespace clforge

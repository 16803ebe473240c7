#include "clforge/linearized.hpp"

#include <cmath>
#include <string>

#include "clforge/errors.hpp"

namespace clforge {

SignalMatrix signal_matrix(const Dataset& data) {
  const int n = data.n();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(data.d(), data.d());
  for (int i = 0; i < n; ++i) {
    A.noalias() += data.y(i) * data.X.row(i).transpose() * data.X.row(i);
  }
  A /= static_cast<double>(n);
  return {std::move(A), data.task_index};
}

double LinearizedNet::output(const Eigen::VectorXd& x) const {
  return forward(init_params, x, act) + output_shift(x);
}

double LinearizedNet::output_shift(const Eigen::VectorXd& x) const {
  if (x.size() != d()) throw DimensionMismatch("LinearizedNet::output: bad x dimension");
  const Eigen::VectorXd h0 = init_params.W * x;
  const Eigen::VectorXd hd = delta * x;
  double out = 0.0;
  for (int i = 0; i < m(); ++i) {
    out += init_params.a(i) * act_deriv(act, h0(i)) * hd(i);
  }
  return out / std::sqrt(static_cast<double>(m()));
}

Eigen::VectorXd LinearizedNet::batch_outputs(const Eigen::MatrixXd& X) const {
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m()));
  const Eigen::MatrixXd H0 = X * init_params.W.transpose();
  const Eigen::MatrixXd HD = X * delta.transpose();
  return (act_value(act, H0) + act_deriv(act, H0).cwiseProduct(HD)) * init_params.a * inv_sqrt_m;
}

namespace {

/// Constant per-task linear-loss displacement direction:
/// g(i,:) = (1/(sqrt(m) n)) sum_v a_i phi'(<w0_i, x_v>) y_v x_v.
Eigen::MatrixXd lazy_task_gradient(const NetParams& init_params, const Dataset& data,
                                   Activation act) {
  const int n = data.n();
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(init_params.m()));
  Eigen::MatrixXd G = act_deriv(act, Eigen::MatrixXd(data.X * init_params.W.transpose()));  // n x m
  G.array().colwise() *= data.y.array() / static_cast<double>(n);
  Eigen::MatrixXd out = G.transpose() * data.X;  // m x d
  out.array().colwise() *= init_params.a.array() * inv_sqrt_m;
  return out;
}

}  // namespace

LinearizedRun train_linearized(const TaskStream& ts, const TrainConfig& cfg,
                               const ModelConfig& model, const LossFn& loss, Seed seed,
                               bool closed_form) {
  if (closed_form && loss.kind != LossKind::linear) {
    throw ModeMismatch("closed-form linearized training requires linear loss, got " + loss.name());
  }

  auto init_stream = derive(seed, "init");
  LinearizedRun run;
  run.net.init_params = init(model.m, ts.d, init_stream, model.balanced_a);
  run.net.act = model.act;
  run.net.delta = Eigen::MatrixXd::Zero(model.m, ts.d);
  run.delta_snapshots.push_back(run.net.delta);

  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(model.m));

  for (int k = 1; k <= ts.num_tasks(); ++k) {
    const Dataset& data = ts.train[static_cast<std::size_t>(k - 1)];
    const Eigen::MatrixXd g = lazy_task_gradient(run.net.init_params, data, model.act);
    const bool regularized = cfg.lambda > 0.0 && k >= 2;

    if (closed_form) {
      // f' == -1 makes the per-task displacement exactly alpha_T * eta * g
      // (alpha_T = T when unregularized).
      const double factor = regularized ? alpha_t(cfg.eta, cfg.lambda, cfg.T)
                                        : static_cast<double>(cfg.T);
      run.net.delta += factor * cfg.eta * g;
    } else {
      const Eigen::MatrixXd anchor = run.net.delta;
      const Eigen::MatrixXd H0 = data.X * run.net.init_params.W.transpose();
      const Eigen::MatrixXd base = act_value(model.act, H0);
      const Eigen::MatrixXd feat = act_deriv(model.act, H0);
      for (int t = 0; t < cfg.T; ++t) {
        const Eigen::VectorXd outputs =
            (base + feat.cwiseProduct(data.X * run.net.delta.transpose())) *
            run.net.init_params.a * inv_sqrt_m;
        const Eigen::VectorXd margins = data.y.cwiseProduct(outputs);
        auto [mean_loss, dloss] = loss_and_grad(loss, margins);
        (void)mean_loss;
        Eigen::MatrixXd G = feat;
        G.array().colwise() *=
            (dloss.cwiseProduct(data.y) / static_cast<double>(data.n())).array();
        Eigen::MatrixXd grad = G.transpose() * data.X;
        grad.array().colwise() *= run.net.init_params.a.array() * inv_sqrt_m;
        if (regularized) grad += cfg.lambda * (run.net.delta - anchor);
        run.net.delta.noalias() -= cfg.eta * grad;
      }
      if (!run.net.delta.allFinite()) {
        throw NonFiniteUpdate("train_linearized: displacement became non-finite");
      }
    }
    run.delta_snapshots.push_back(run.net.delta);
  }
  return run;
}

double infinite_width_prediction(const std::vector<SignalMatrix>& signals, double eta, int T,
                                 const Eigen::VectorXd& x) {
  double quad = 0.0;
  for (const auto& s : signals) quad += x.dot(s.A * x);
  return eta * static_cast<double>(T) * quad;
}

double u_statistic(const Dataset& data, const Eigen::VectorXd& probe_x, double probe_y) {
  if (probe_x.size() != data.d()) throw DimensionMismatch("u_statistic: probe dimension");
  (void)probe_y;
  const Eigen::VectorXd dots = data.X * probe_x;
  return data.y.dot(dots.cwiseAbs2()) / static_cast<double>(data.n());
}

double alpha_t(double eta, double lambda, long t) {
  const double el = eta * lambda;
  if (el == 0.0) return static_cast<double>(t);
  return (1.0 - std::pow(1.0 - el, static_cast<double>(t))) / el;
}

double alpha_t_approx(double eta, double lambda, long t) {
  const double el = eta * lambda;
  if (el == 0.0) return static_cast<double>(t);
  return (1.0 - std::exp(-el * static_cast<double>(t))) / el;
}

double regularized_equivalence_check(const TaskStream& ts, double eta, int T, double lambda,
                                     Seed seed) {
  TrainConfig reg_cfg;
  reg_cfg.eta = eta;
  reg_cfg.T = T;
  reg_cfg.lambda = lambda;
  ModelConfig model;
  model.m = 64;
  model.act = Activation::quadratic;

  const LossFn linear{LossKind::linear};
  // (a) iterated regularized surrogate
  const LinearizedRun regularized = train_linearized(ts, reg_cfg, model, linear, seed, false);
  // (b) unregularized closed form with each task's displacement rescaled by
  // alpha_T/T; algebraically identical to step-size alpha_T*eta/T
  TrainConfig eq_cfg = reg_cfg;
  const LinearizedRun rescaled = train_linearized(ts, eq_cfg, model, linear, seed, true);

  return (regularized.net.delta - rescaled.net.delta).cwiseAbs().maxCoeff();
}

MonteCarloEstimate ntk_margin_mc(const TaskSpec& spec, const Eigen::VectorXd& x, double y,
                                 long samples, Stream& stream) {
  if (x.size() != spec.d) throw DimensionMismatch("ntk_margin_mc: probe dimension");
  const Eigen::VectorXd sum_dir = spec.mu_plus + spec.mu_minus;
  const Eigen::VectorXd diff_dir = spec.mu_plus - spec.mu_minus;
  const Eigen::VectorXd wp = spec.mu_plus / spec.mu_plus.norm();
  const Eigen::VectorXd wm = spec.mu_minus / spec.mu_minus.norm();
  const double xp = wp.dot(x);
  const double xm = wm.dot(x);

  Eigen::VectorXd z(spec.d);
  double acc = 0.0;
  double acc_sq = 0.0;
  for (long s = 0; s < samples; ++s) {
    for (int j = 0; j < spec.d; ++j) z(j) = stream.gaussian();
    const double zs = z.dot(sum_dir);
    const double zd = z.dot(diff_dir);
    // regions R1..R4 by the signs of z.(mu_+ + mu_-) and z.(mu_+ - mu_-);
    // ties go to the positive region
    double wx;
    if (zs >= 0.0) {
      wx = zd >= 0.0 ? xp : -xm;
    } else {
      wx = zd >= 0.0 ? xm : -xp;
    }
    const double v = y * z.dot(x) * wx;  // phi'(t) = t for the quadratic activation
    acc += v;
    acc_sq += v * v;
  }
  const double mean = acc / static_cast<double>(samples);
  const double var = acc_sq / static_cast<double>(samples) - mean * mean;
  return {mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(samples))};
}

}  // namespace clforge

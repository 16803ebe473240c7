#include <doctest.h>

#include <cmath>

#include "clforge/errors.hpp"
#include "clforge/linearized.hpp"

using namespace clforge;

namespace {

TaskStream tiny_stream(std::uint64_t seed, int d = 8, int K = 2, int n = 100) {
  auto s = derive(Seed{seed}, "data");
  return build_stream(d, K, n, n, 0.1 / std::sqrt(static_cast<double>(d)), s);
}

}  // namespace

TEST_CASE("signal matrix matches the explicit sum and is symmetric") {
  Dataset data;
  data.X = Eigen::MatrixXd::Zero(2, 2);
  data.X << 1.0, 2.0, 0.0, -1.0;
  data.y = Eigen::VectorXd::Zero(2);
  data.y << 1.0, -1.0;
  const SignalMatrix s = signal_matrix(data);
  // (1/2)[ (1,2)(1,2)^T - (0,-1)(0,-1)^T ]
  CHECK(s.A(0, 0) == doctest::Approx(0.5));
  CHECK(s.A(0, 1) == doctest::Approx(1.0));
  CHECK(s.A(1, 0) == doctest::Approx(1.0));
  CHECK(s.A(1, 1) == doctest::Approx(1.5));
}

TEST_CASE("linearized output reduces to the finite net at zero displacement") {
  auto is = derive(Seed{61}, "init");
  LinearizedNet net;
  net.init_params = init(16, 5, is);
  net.act = Activation::gelu;
  net.delta = Eigen::MatrixXd::Zero(16, 5);
  auto xs = derive(Seed{61}, "x");
  Eigen::VectorXd x(5);
  for (int j = 0; j < 5; ++j) x(j) = xs.gaussian();
  CHECK(net.output(x) == doctest::Approx(forward(net.init_params, x, net.act)));
  CHECK(net.output_shift(x) == 0.0);
}

TEST_CASE("the output shift is linear in the displacement") {
  auto is = derive(Seed{63}, "init");
  LinearizedNet net;
  net.init_params = init(12, 4, is);
  net.act = Activation::quadratic;
  auto xs = derive(Seed{63}, "x");
  net.delta = Eigen::MatrixXd::NullaryExpr(12, 4, [&](Eigen::Index, Eigen::Index) {
    return xs.gaussian();
  });
  Eigen::VectorXd x(4);
  for (int j = 0; j < 4; ++j) x(j) = xs.gaussian();
  const double shift = net.output_shift(x);
  LinearizedNet doubled = net;
  doubled.delta *= 2.0;
  CHECK(doubled.output_shift(x) == doctest::Approx(2.0 * shift));
  // batch path agrees with the scalar path
  Eigen::MatrixXd X = x.transpose();
  CHECK(net.batch_outputs(X)(0) == doctest::Approx(net.output(x)));
}

TEST_CASE("closed form equals the iterated surrogate for the linear loss") {
  const TaskStream ts = tiny_stream(65);
  TrainConfig cfg;
  cfg.eta = 0.05;
  cfg.T = 60;
  ModelConfig model;
  model.m = 32;
  const LossFn lin{LossKind::linear};
  const LinearizedRun closed = train_linearized(ts, cfg, model, lin, Seed{2}, true);
  const LinearizedRun iter = train_linearized(ts, cfg, model, lin, Seed{2}, false);
  CHECK((closed.net.delta - iter.net.delta).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(closed.delta_snapshots.size() == 3);
  CHECK(closed.delta_snapshots[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("closed form rejects curved losses") {
  const TaskStream ts = tiny_stream(67);
  TrainConfig cfg;
  ModelConfig model;
  model.m = 8;
  CHECK_THROWS_AS(train_linearized(ts, cfg, model, LossFn{LossKind::hinge}, Seed{1}, true),
                  ModeMismatch);
}

TEST_CASE("alpha_t closed form satisfies its recursion") {
  const double eta = 0.1;
  for (double lambda : {0.01, 0.1, 1.0}) {
    double rec = 0.0;
    for (long t = 1; t <= 300; ++t) {
      rec = (1.0 - eta * lambda) * rec + 1.0;
      CHECK(alpha_t(eta, lambda, t) == doctest::Approx(rec).epsilon(1e-12));
    }
  }
  CHECK(alpha_t(0.5, 0.0, 123) == 123.0);
  // exponential approximation is tight when eta*lambda is small
  CHECK(alpha_t_approx(0.01, 0.1, 400) ==
        doctest::Approx(alpha_t(0.01, 0.1, 400)).epsilon(1e-3));
}

TEST_CASE("regularized training equals the alpha-rescaled unregularized run") {
  const TaskStream ts = tiny_stream(69);
  CHECK(regularized_equivalence_check(ts, 0.1, 100, 0.5, Seed{3}) <= 1e-10);
}

TEST_CASE("infinite-width prediction is the quadratic form in the signal matrices") {
  const TaskStream ts = tiny_stream(71, 6, 2, 40);
  std::vector<SignalMatrix> sigs;
  for (const auto& d : ts.train) sigs.push_back(signal_matrix(d));
  auto xs = derive(Seed{71}, "x");
  Eigen::VectorXd x(6);
  for (int j = 0; j < 6; ++j) x(j) = xs.gaussian();
  double expect = 0.0;
  for (const auto& s : sigs) expect += x.dot(s.A * x);
  expect *= 2.0 * 100.0;
  CHECK(infinite_width_prediction(sigs, 2.0, 100, x) == doctest::Approx(expect));
}

TEST_CASE("u-statistic matches its definition") {
  Dataset data;
  data.X = Eigen::MatrixXd::Zero(2, 2);
  data.X << 1.0, 1.0, 2.0, 0.0;
  data.y = Eigen::VectorXd::Zero(2);
  data.y << 1.0, -1.0;
  Eigen::VectorXd probe(2);
  probe << 1.0, -1.0;
  // (1/2)[ (1*1 + 1*(-1))^2 - (2*1 + 0)^2 ] = (0 - 4)/2
  CHECK(u_statistic(data, probe, 1.0) == doctest::Approx(-2.0));
  CHECK_THROWS_AS(u_statistic(data, Eigen::VectorXd::Zero(3), 1.0), DimensionMismatch);
}

TEST_CASE("ntk margin estimate is positive and deterministic at a cluster center") {
  const TaskSpec spec = make_task_spec(16, 1, 0.0);
  auto s1 = derive(Seed{73}, "z");
  auto s2 = derive(Seed{73}, "z");
  const MonteCarloEstimate a = ntk_margin_mc(spec, spec.mu_plus, 1.0, 20000, s1);
  const MonteCarloEstimate b = ntk_margin_mc(spec, spec.mu_plus, 1.0, 20000, s2);
  CHECK(a.mean == b.mean);
  CHECK(a.mean > 3.0 * a.std_err);
  CHECK(a.std_err > 0.0);
}

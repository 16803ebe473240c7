#include <doctest.h>

#include <cmath>

#include "clforge/errors.hpp"
#include "clforge/model.hpp"
#include "clforge/prng.hpp"

using namespace clforge;

TEST_CASE("activation values and derivatives at reference points") {
  CHECK(act_value(Activation::quadratic, 2.0) == doctest::Approx(2.0));  // t^2/2
  CHECK(act_deriv(Activation::quadratic, 2.0) == doctest::Approx(2.0));
  CHECK(act_value(Activation::relu, -1.5) == 0.0);
  CHECK(act_value(Activation::relu, 1.5) == 1.5);
  CHECK(act_deriv(Activation::relu, -1.5) == 0.0);
  CHECK(act_deriv(Activation::relu, 1.5) == 1.0);
  // gelu(t) = t * Phi(t) with the exact Gaussian CDF
  CHECK(act_value(Activation::gelu, 0.0) == 0.0);
  CHECK(act_deriv(Activation::gelu, 0.0) == doctest::Approx(0.5));
  CHECK(act_value(Activation::gelu, 1.0) == doctest::Approx(0.8413447460685429));
  CHECK(act_deriv(Activation::gelu, 1.0) ==
        doctest::Approx(0.8413447460685429 + 0.24197072451914337));
}

TEST_CASE("activation parsing round-trips and rejects unknown names") {
  for (auto act : {Activation::quadratic, Activation::relu, Activation::gelu}) {
    CHECK(parse_activation(to_string(act)) == act);
  }
  CHECK_THROWS_AS(parse_activation("tanh"), ConfigError);
}

TEST_CASE("init draws gaussian weights and sign outputs") {
  auto s = derive(Seed{2}, "init");
  const NetParams p = init(40, 7, s);
  CHECK(p.m() == 40);
  CHECK(p.d() == 7);
  for (int i = 0; i < 40; ++i) CHECK(std::abs(p.a(i)) == 1.0);
  auto s2 = derive(Seed{2}, "init");
  const NetParams q = init(40, 7, s2);
  CHECK((p.W - q.W).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("balanced output signs sum to zero for even m") {
  auto s = derive(Seed{4}, "init");
  const NetParams p = init(64, 5, s, true);
  CHECK(p.a.sum() == 0.0);
}

TEST_CASE("forward matches the explicit sum") {
  auto s = derive(Seed{6}, "init");
  const NetParams p = init(9, 4, s);
  Eigen::VectorXd x(4);
  x << 0.3, -1.2, 0.7, 0.1;
  for (auto act : {Activation::quadratic, Activation::relu, Activation::gelu}) {
    double expect = 0.0;
    for (int i = 0; i < 9; ++i) expect += p.a(i) * act_value(act, p.W.row(i).dot(x));
    expect /= std::sqrt(9.0);
    CHECK(forward(p, x, act) == doctest::Approx(expect));
  }
}

TEST_CASE("batch outputs agree with per-sample forward") {
  auto s = derive(Seed{8}, "init");
  const NetParams p = init(16, 5, s);
  auto xs = derive(Seed{8}, "x");
  Eigen::MatrixXd X(6, 5);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 5; ++j) X(i, j) = xs.gaussian();
  const Eigen::VectorXd out = batch_outputs(p, X, Activation::gelu);
  for (int i = 0; i < 6; ++i) {
    CHECK(out(i) == doctest::Approx(forward(p, Eigen::VectorXd(X.row(i)), Activation::gelu)));
  }
}

TEST_CASE("grad_margin matches central differences") {
  auto s = derive(Seed{10}, "init");
  NetParams p = init(6, 3, s);
  Eigen::VectorXd x(3);
  x << 0.9, -0.4, 1.3;
  const Eigen::MatrixXd G = grad_margin(p, x, Activation::gelu);
  const double h = 1e-6;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 3; ++j) {
      NetParams pp = p, pm = p;
      pp.W(i, j) += h;
      pm.W(i, j) -= h;
      const double fd =
          (forward(pp, x, Activation::gelu) - forward(pm, x, Activation::gelu)) / (2 * h);
      CHECK(G(i, j) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("dimension mismatches are rejected") {
  auto s = derive(Seed{12}, "init");
  const NetParams p = init(4, 3, s);
  CHECK_THROWS_AS(forward(p, Eigen::VectorXd::Zero(5), Activation::relu), DimensionMismatch);
}

#include <doctest.h>

#include <cmath>

#include "clforge/errors.hpp"
#include "clforge/loss.hpp"

using namespace clforge;

TEST_CASE("pointwise values and derivatives") {
  const LossFn hinge{LossKind::hinge}, logi{LossKind::logistic}, lin{LossKind::linear};
  CHECK(hinge.value(0.0) == 1.0);
  CHECK(hinge.value(1.0) == 0.0);
  CHECK(hinge.value(2.0) == 0.0);
  CHECK(hinge.deriv(0.0) == -1.0);
  CHECK(hinge.deriv(1.0) == 0.0);  // subgradient choice at the kink
  CHECK(hinge.deriv(2.0) == 0.0);

  CHECK(logi.value(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(logi.deriv(0.0) == doctest::Approx(-0.5));

  CHECK(lin.value(-3.0) == 4.0);
  CHECK(lin.deriv(100.0) == -1.0);
}

TEST_CASE("logistic loss is numerically stable far from the origin") {
  const LossFn logi{LossKind::logistic};
  CHECK(logi.value(-1000.0) == doctest::Approx(1000.0));
  CHECK(logi.value(1000.0) == 0.0);
  CHECK(std::isfinite(logi.deriv(-1000.0)));
}

TEST_CASE("hinge equals linear wherever the margin is below one") {
  const LossFn hinge{LossKind::hinge}, lin{LossKind::linear};
  for (double u : {-5.0, -1.0, 0.0, 0.5, 0.999}) {
    CHECK(hinge.value(u) == lin.value(u));
    CHECK(hinge.deriv(u) == lin.deriv(u));
  }
}

TEST_CASE("only the logistic loss is self-bounded") {
  CHECK(LossFn{LossKind::logistic}.self_bounded());
  CHECK_FALSE(LossFn{LossKind::hinge}.self_bounded());
  CHECK_FALSE(LossFn{LossKind::linear}.self_bounded());
  for (double u : {-3.0, -0.1, 0.0, 2.0, 10.0}) {
    const LossFn logi{LossKind::logistic};
    CHECK(std::abs(logi.deriv(u)) <= logi.value(u) + 1e-15);
  }
}

TEST_CASE("loss_and_grad averages values and stacks derivatives") {
  Eigen::VectorXd margins(3);
  margins << -1.0, 0.5, 2.0;
  const auto [mean, grad] = loss_and_grad(LossFn{LossKind::hinge}, margins);
  CHECK(mean == doctest::Approx((2.0 + 0.5 + 0.0) / 3.0));
  CHECK(grad(0) == -1.0);
  CHECK(grad(1) == -1.0);
  CHECK(grad(2) == 0.0);
}

TEST_CASE("misclassification counts zero margins as errors") {
  Eigen::VectorXd margins(4);
  margins << -0.2, 0.0, 0.1, 3.0;
  CHECK(misclassification(margins) == doctest::Approx(0.5));
}

TEST_CASE("parse rejects unknown losses") {
  CHECK(LossFn::parse("hinge").kind == LossKind::hinge);
  CHECK_THROWS_AS(LossFn::parse("square"), ConfigError);
}

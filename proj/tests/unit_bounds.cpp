#include <doctest.h>

#include <cmath>

#include "clforge/bounds.hpp"
#include "clforge/errors.hpp"

using namespace clforge;

TEST_CASE("theorem-1 bound evaluates its three terms") {
  BoundInputs in;
  in.d = 10;
  in.n = 100;
  in.m = 10000;
  in.T = 10;
  in.K = 4;
  in.k = 2;
  in.eta = 0.5;
  const double log_d = std::log(10.0);
  const double expect = 2.0 * 0.5 * 10.0 * std::sqrt(2.0) / (10.0 * 10.0) +
                        3.0 * 0.5 * 10.0 * std::sqrt(2.0) / (100.0 * log_d * log_d) +
                        5.0 * 0.25 * 100.0 * 16.0 / 100.0;
  CHECK(thm1_forgetting_bound(in, 2.0, 3.0, 5.0) == doctest::Approx(expect));
}

TEST_CASE("theorem-3 bound evaluates the exponential form") {
  BoundInputs in;
  in.n = 200;
  in.m = 1e6;
  in.T = 50;
  in.K = 3;
  in.k = 1;
  in.eta = 0.2;
  const double expect = 0.2 * 50.0 * std::exp(0.2 * 50.0 * 3.0 / 1000.0) / 200.0;
  CHECK(thm3_gen_gap_bound(in) == doctest::Approx(expect));
}

TEST_CASE("theorem-4 bound uses the recorded loss traces") {
  BoundInputs in;
  in.n = 100;
  in.m = 1e4;
  in.K = 3;
  in.k = 1;
  in.eta = 0.5;
  in.S = {12.0, 8.0, 4.0};
  const double expect = (0.5 / 100.0) * std::exp(0.5 * (8.0 + 4.0) / 100.0) * 12.0;
  CHECK(thm4_gen_gap_bound(in) == doctest::Approx(expect));

  in.S = {12.0};
  CHECK_THROWS_AS(thm4_gen_gap_bound(in), MissingLossTrace);
}

TEST_CASE("bounds move the right way with resources and the task gap") {
  BoundInputs base;
  base.d = 50;
  base.n = 1000;
  base.m = 1e6;
  base.T = 100;
  base.K = 5;
  base.k = 3;
  base.eta = 1.0;
  auto tweak = [&](auto f) {
    BoundInputs b = base;
    f(b);
    return b;
  };
  CHECK(thm1_forgetting_bound(tweak([](auto& b) { b.k = 1; })) > thm1_forgetting_bound(base));
  CHECK(thm1_forgetting_bound(tweak([](auto& b) { b.n = 4e3; })) < thm1_forgetting_bound(base));
  CHECK(thm1_forgetting_bound(tweak([](auto& b) { b.m = 1e8; })) < thm1_forgetting_bound(base));
  CHECK(thm3_gen_gap_bound(tweak([](auto& b) { b.k = 1; })) > thm3_gen_gap_bound(base));
  CHECK(thm3_gen_gap_bound(tweak([](auto& b) { b.n = 4e3; })) < thm3_gen_gap_bound(base));
}

TEST_CASE("complexity recipe follows the stated scalings and caps m") {
  const ComplexityRecipe r = complexity_recipe(10, 2, 1.5, 1.0, 2.0, 1e30);
  CHECK(r.n == doctest::Approx(1.5 * 100.0 * 2.0 * std::log(10.0)));
  CHECK(r.m == doctest::Approx(std::pow(10.0, 8) * 16.0));
  CHECK(r.eta_T == doctest::Approx(200.0));
  CHECK_FALSE(r.m_capped);

  const ComplexityRecipe capped = complexity_recipe(10, 2, 1.0, 1.0, 1.0, 1e6);
  CHECK(capped.m == 1e6);
  CHECK(capped.m_capped);
}

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "clforge/prng.hpp"

using namespace clforge;

TEST_CASE("same seed and label reproduce the same draws") {
  auto a = derive(Seed{42}, "x");
  auto b = derive(Seed{42}, "x");
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different labels and seeds give different streams") {
  auto a = derive(Seed{42}, "x");
  auto b = derive(Seed{42}, "y");
  auto c = derive(Seed{43}, "x");
  int eq_ab = 0, eq_ac = 0;
  for (int i = 0; i < 64; ++i) {
    const auto va = a.next_u64();
    eq_ab += (va == b.next_u64());
    eq_ac += (va == c.next_u64());
  }
  CHECK(eq_ab == 0);
  CHECK(eq_ac == 0);
}

TEST_CASE("sibling children are order-insensitive") {
  auto root = derive(Seed{7}, "root");
  // drawing from one child does not disturb another derived later
  auto c1 = root.child("a");
  const double first = c1.uniform01();
  auto c2 = root.child("b");
  (void)c2.uniform01();
  auto c1_again = root.child("a");
  CHECK(c1_again.uniform01() == first);
  CHECK(root.child("a").label() == "root/a");
}

TEST_CASE("empty labels are rejected") {
  auto s = derive(Seed{1}, "x");
  CHECK_THROWS_AS(s.child(""), std::invalid_argument);
  CHECK_THROWS_AS(derive(Seed{1}, ""), std::invalid_argument);
}

TEST_CASE("uniform01 stays in the open interval with the right moments") {
  auto s = derive(Seed{11}, "u");
  double sum = 0, sumsq = 0;
  const int N = 50000;
  for (int i = 0; i < N; ++i) {
    const double u = s.uniform01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  const double mean = sum / N;
  CHECK(std::abs(mean - 0.5) < 0.01);
  CHECK(std::abs(sumsq / N - mean * mean - 1.0 / 12.0) < 0.01);
}

TEST_CASE("gaussian consumes exactly two uniforms") {
  auto a = derive(Seed{5}, "g");
  auto b = derive(Seed{5}, "g");
  (void)a.gaussian();
  (void)b.uniform01();
  (void)b.uniform01();
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rademacher is +/-1 and roughly balanced") {
  auto s = derive(Seed{13}, "r");
  double sum = 0;
  for (int i = 0; i < 20000; ++i) {
    const double v = s.rademacher();
    CHECK(std::abs(v) == 1.0);
    sum += v;
  }
  CHECK(std::abs(sum / 20000) < 0.03);
}

TEST_CASE("vector helpers draw the requested count") {
  auto s = derive(Seed{17}, "v");
  CHECK(gaussian(s, 37).size() == 37);
  CHECK(rademacher(s, 12).size() == 12);
}

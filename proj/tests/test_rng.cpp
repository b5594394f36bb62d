#include <cmath>
#include <set>

#include "doctest.h"
#include "gcs/rng.hpp"

using gcs::RngStream;

TEST_CASE("same seed reproduces the sequence") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds and streams differ") {
  RngStream a(42), b(43), c(42, 1);
  CHECK(a.next_u64() != b.next_u64());
  RngStream a2(42);
  CHECK(a2.next_u64() != c.next_u64());
}

TEST_CASE("split does not depend on parent draw position") {
  RngStream parent(7);
  RngStream early = parent.split(3);
  parent.next_u64();
  parent.next_u64();
  RngStream late = parent.split(3);
  CHECK(early.next_u64() == late.next_u64());
}

TEST_CASE("sibling splits are distinct") {
  RngStream parent(7);
  std::set<std::uint64_t> firsts;
  for (std::uint64_t child = 0; child < 64; ++child)
    firsts.insert(parent.split(child).next_u64());
  CHECK(firsts.size() == 64);
}

TEST_CASE("uniform lies in [0, 1) and uniform_open in (0, 1]") {
  RngStream rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = rng.uniform_open();
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("gaussian moments") {
  RngStream rng(5);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("exponential has unit mean") {
  RngStream rng(9);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.exponential();
  CHECK(std::abs(sum / n - 1.0) < 0.01);
}

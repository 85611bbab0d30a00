#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "radon_edges/geometry.hpp"
#include "oracles.hpp"

namespace radon_edges::test_support {

// Seeded value source for hand-rolled property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double sign() { return integer(0, 1) ? 1.0 : -1.0; }
  Point2 point(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi)}; }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Runs `body` on `cases` independently seeded generators; failures report
// the case index and its seed.
template <class F>
void for_all(int cases, std::uint64_t seed, F&& body) {
  for (int i = 0; i < cases; ++i) {
    const std::uint64_t s = seed * 1000003ULL + static_cast<std::uint64_t>(i);
    SCOPED_TRACE("property case " + std::to_string(i) + ", seed " + std::to_string(s));
    Gen g(s);
    body(g);
    if (::testing::Test::HasFatalFailure()) return;
  }
}

}  // namespace radon_edges::test_support

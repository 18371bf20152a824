#include "doctest.h"

#include <cmath>
#include <vector>

#include "pricelab/rng.hpp"
#include "pricelab/rolling.hpp"

using namespace pricelab;

namespace {

double naive_window_mean(const std::vector<double>& xs, std::size_t end,
                         std::size_t window) {
  const std::size_t n = std::min(end, window);
  double sum = 0.0;
  for (std::size_t i = end - n; i < end; ++i) sum += xs[i];
  return sum / static_cast<double>(n);
}

}  // namespace

TEST_CASE("rolling mean matches a naive recomputation") {
  RandomStream gen(1, 0);
  for (const std::size_t window : {std::size_t{1}, std::size_t{3},
                                   std::size_t{10}, std::size_t{100}}) {
    RollingMean rolling(window);
    std::vector<double> xs;
    for (int i = 0; i < 1000; ++i) {
      xs.push_back(gen.next_unit() * 100.0);
      rolling.push(xs.back());
      const double expected = naive_window_mean(xs, xs.size(), window);
      REQUIRE(rolling.mean() == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("window of one reports the last sample") {
  RollingMean rolling(1);
  rolling.push(5.0);
  CHECK(rolling.mean() == 5.0);
  rolling.push(-2.0);
  CHECK(rolling.mean() == -2.0);
}

TEST_CASE("full() flips once the window fills") {
  RollingMean rolling(3);
  rolling.push(1.0);
  rolling.push(1.0);
  CHECK_FALSE(rolling.full());
  rolling.push(1.0);
  CHECK(rolling.full());
}

TEST_CASE("drift stays negligible over long runs") {
  RandomStream gen(2, 0);
  const std::size_t window = 1000;
  RollingMean rolling(window);
  std::vector<double> xs;
  xs.reserve(200000);
  for (int i = 0; i < 200000; ++i) {
    xs.push_back(gen.bernoulli(0.5) ? 0.0 : 90.0);
    rolling.push(xs.back());
  }
  const double expected = naive_window_mean(xs, xs.size(), window);
  CHECK(std::abs(rolling.mean() - expected) < 1e-9);
}

TEST_CASE("degenerate uses are rejected") {
  CHECK_THROWS_AS(RollingMean(0), std::invalid_argument);
  RollingMean empty(5);
  CHECK_THROWS_AS(empty.mean(), std::logic_error);
}

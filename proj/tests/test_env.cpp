#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "pricelab/env.hpp"
#include "pricelab/rng.hpp"

using namespace pricelab;

TEST_CASE("preset grids match the published discretizations") {
  const auto ss = sparse_state_grid();
  REQUIRE(ss.size() == 7);
  CHECK(ss.front() == doctest::Approx(0.2));
  CHECK(ss.back() == doctest::Approx(0.8));

  const auto gs = granular_state_grid();
  REQUIRE(gs.size() == 40);
  CHECK(gs.front() == doctest::Approx(0.2));
  CHECK(gs.back() == doctest::Approx(0.785));

  const auto sa = sparse_action_grid();
  REQUIRE(sa.size() == 10);
  CHECK(sa.front() == 0.0);
  CHECK(sa.back() == doctest::Approx(0.9));

  const auto ga = granular_action_grid();
  REQUIRE(ga.size() == 80);
  CHECK(ga.front() == 0.0);
  CHECK(ga.back() == doctest::Approx(0.79));
}

TEST_CASE("EnvConfig validation rejects bad parameters") {
  EnvConfig env;
  CHECK_NOTHROW(env.validate());

  EnvConfig bad = env;
  bad.base_price = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = env;
  bad.steepness = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = env;
  bad.state_grid.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = env;
  bad.state_grid = {0.5, 0.5};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = env;
  bad.state_grid = {0.0, 0.5};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = env;
  bad.action_grid = {0.2, 1.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("purchase_probability known values") {
  CHECK(purchase_probability(0.6, 0.0, -35.0) == 0.0);
  CHECK(purchase_probability(0.0, 0.5, -35.0) == 0.0);
  // 0.6 * (1 - e^{-3.5})
  CHECK(purchase_probability(0.6, 0.1, -35.0) ==
        doctest::Approx(0.5818815699466089).epsilon(1e-12));
}

TEST_CASE("purchase_probability rejects domain violations") {
  CHECK_THROWS_AS(purchase_probability(1.2, 0.1, -35.0), std::invalid_argument);
  CHECK_THROWS_AS(purchase_probability(-0.1, 0.1, -35.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(purchase_probability(0.5, 1.0, -35.0), std::invalid_argument);
  CHECK_THROWS_AS(purchase_probability(0.5, -0.2, -35.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(purchase_probability(0.5, 0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(purchase_probability(0.5, 0.1, 2.0), std::invalid_argument);
}

TEST_CASE("purchase_probability properties over random domains") {
  RandomStream gen(1234, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double beta = gen.next_unit();
    const double d1 = gen.next_unit() * 0.999;
    const double d2 = gen.next_unit() * 0.999;
    const double zeta = -(gen.next_unit() * 99.0 + 0.5);
    const double lo = std::min(d1, d2), hi = std::max(d1, d2);
    const double p_lo = purchase_probability(beta, lo, zeta);
    const double p_hi = purchase_probability(beta, hi, zeta);
    REQUIRE(p_lo >= 0.0);
    REQUIRE(p_hi <= beta);
    REQUIRE(p_lo <= p_hi);  // non-decreasing in discount
    // exactly linear in beta: beta enters as the leading multiplier
    REQUIRE(purchase_probability(beta, hi, zeta) ==
            beta * purchase_probability(1.0, hi, zeta));
    REQUIRE(purchase_probability(beta, 0.0, zeta) == 0.0);
  }
}

TEST_CASE("sample_customer is uniform and deterministic") {
  EnvConfig env;

  SUBCASE("single-element grid") {
    env.state_grid = {0.4};
    RandomStream rng(3, 0);
    for (int i = 0; i < 100; ++i) {
      const CustomerState s = sample_customer(env, rng);
      CHECK(s.state_index == 0);
      CHECK(s.beta_prob == 0.4);
    }
  }

  SUBCASE("sparse grid frequencies within 0.005 of 1/7") {
    std::vector<int> counts(7, 0);
    RandomStream rng(4, 0);
    const int n = 700000;
    for (int i = 0; i < n; ++i) {
      const CustomerState s = sample_customer(env, rng);
      REQUIRE(s.beta_prob == env.state_grid[s.state_index]);
      ++counts[s.state_index];
    }
    for (int c : counts)
      CHECK(std::abs(static_cast<double>(c) / n - 1.0 / 7.0) < 0.005);
  }

  SUBCASE("fixed seed reproduces the draw sequence") {
    RandomStream a(5, 0), b(5, 0);
    for (int i = 0; i < 200; ++i)
      CHECK(sample_customer(env, a).state_index ==
            sample_customer(env, b).state_index);
  }
}

TEST_CASE("step edge cases and reward support") {
  EnvConfig env;

  SUBCASE("zero discount never sells") {
    RandomStream rng(6, 0);
    const CustomerState state{4, env.state_grid[4]};
    for (int i = 0; i < 5000; ++i) {
      const Observation obs = step(env, state, 0, rng);
      CHECK_FALSE(obs.purchased);
      CHECK(obs.reward == 0.0);
    }
  }

  SUBCASE("zero consideration never sells") {
    RandomStream rng(7, 0);
    const CustomerState state{0, 0.0};
    for (int i = 0; i < 5000; ++i)
      CHECK(step(env, state, 3, rng).reward == 0.0);
  }

  SUBCASE("rewards take exactly the two values 0 and price") {
    RandomStream rng(8, 0);
    const CustomerState state{4, env.state_grid[4]};  // beta = 0.6
    const std::size_t action = 1;                     // d = 0.1
    const double price = env.base_price * (1.0 - env.action_grid[action]);
    bool saw_zero = false, saw_price = false;
    for (int i = 0; i < 20000; ++i) {
      const Observation obs = step(env, state, action, rng);
      if (obs.purchased) {
        REQUIRE(obs.reward == price);
        saw_price = true;
      } else {
        REQUIRE(obs.reward == 0.0);
        saw_zero = true;
      }
    }
    CHECK(saw_zero);
    CHECK(saw_price);
  }

  SUBCASE("invalid action index is rejected") {
    RandomStream rng(9, 0);
    const CustomerState state{0, env.state_grid[0]};
    CHECK_THROWS_AS(step(env, state, 10, rng), std::invalid_argument);
  }
}

TEST_CASE("step mean reward matches the closed form at (0.6, 0.1)") {
  EnvConfig env;
  const CustomerState state{4, env.state_grid[4]};
  RandomStream rng(10, 0);
  const int n = 1000000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += step(env, state, 1, rng).reward;
  const double mean = sum / n;
  // derived: 0.5818815699466089 * 90
  const double expected = 52.36934129519481;
  const double p = 0.5818815699466089;
  const double se = 90.0 * std::sqrt(p * (1.0 - p) / n);
  CHECK(std::abs(mean - expected) <= 3.0 * se);
}

TEST_CASE("empirical purchase frequency obeys the 4-sigma law") {
  EnvConfig env;
  const int n = 100000;
  for (const auto& [s, a] : std::vector<std::pair<std::size_t, std::size_t>>{
           {0, 1}, {4, 1}, {6, 5}, {2, 9}}) {
    const CustomerState state{s, env.state_grid[s]};
    const double p =
        purchase_probability(env.state_grid[s], env.action_grid[a],
                             env.steepness);
    RandomStream rng(1000 + s * 10 + a, 0);
    int purchases = 0;
    for (int i = 0; i < n; ++i)
      if (step(env, state, a, rng).purchased) ++purchases;
    const double freq = static_cast<double>(purchases) / n;
    CHECK(std::abs(freq - p) <= 4.0 * std::sqrt(p * (1.0 - p) / n));
  }
}

TEST_CASE("reward_histogram bin structure") {
  EnvConfig env;
  const CustomerState state{4, env.state_grid[4]};
  RandomStream rng(11, 0);

  SUBCASE("fixed positive discount gives at most two bins") {
    ActionPolicy policy{ActionPolicy::Kind::fixed, 3};
    const auto bins = reward_histogram(env, state, policy, 20000, rng);
    CHECK(bins.size() <= 2);
    std::uint64_t total = 0;
    for (const auto& bin : bins) total += bin.count;
    CHECK(total == 20000);
  }

  SUBCASE("uniform policy over 10 discounts gives at most 11 bins") {
    ActionPolicy policy;  // uniform
    const auto bins = reward_histogram(env, state, policy, 50000, rng);
    CHECK(bins.size() <= 11);
    CHECK(bins.front().reward == 0.0);
  }

  SUBCASE("zero-discount policy puts all mass at zero") {
    ActionPolicy policy{ActionPolicy::Kind::fixed, 0};
    const auto bins = reward_histogram(env, state, policy, 5000, rng);
    REQUIRE(bins.size() == 1);
    CHECK(bins.front().reward == 0.0);
    CHECK(bins.front().count == 5000);
  }

  SUBCASE("n = 0 is rejected") {
    ActionPolicy policy;
    CHECK_THROWS_AS(reward_histogram(env, state, policy, 0, rng),
                    std::invalid_argument);
  }
}

#include <doctest.h>

#include <random>

#include "agh/env.h"
#include "agh/heuristics.h"
#include "agh/oracle.h"
#include "support.h"

using namespace agh;
using namespace agh::heuristics;
using testing::FlightSpec;

TEST_CASE("single flight gives the single round trip") {
  const auto sub = testing::make_sub({{0, 0}, {3, 0}}, {{1, 1, 1, 0, 100}});
  const SubSolution expect{{-1, {1}}};
  CHECK(nearest_neighbor(sub) == expect);
  CHECK(cws(sub) == expect);
  for (auto rule : {InsertionRule::Random, InsertionRule::Nearest, InsertionRule::Farthest}) {
    CHECK(insertion(sub, rule, 3) == expect);
  }
}

TEST_CASE("nearest neighbor breaks ties by lowest id") {
  // Gates 1 and 2 mirror each other around the depot.
  const auto sub = testing::make_sub({{0, 0}, {-4, 0}, {4, 0}}, {{2, 1, 1, 0, 100}, {1, 1, 1, 0, 100}});
  const auto sol = nearest_neighbor(sub);
  REQUIRE(sol.size() == 1);
  CHECK(sol[0].nodes.front() == 1);
}

TEST_CASE("nearest insertion on collinear gates follows distance order") {
  const auto sub = testing::make_sub({{0, 0}, {30, 0}, {10, 0}, {20, 0}},
                                     {{1, 1, 1, 0, 1000}, {2, 1, 1, 0, 1000}, {3, 1, 1, 0, 1000}});
  const auto sol = insertion(sub, InsertionRule::Nearest, 1);
  REQUIRE(sol.size() == 1);
  const bool monotone = sol[0].nodes == std::vector<int>{2, 3, 1} || sol[0].nodes == std::vector<int>{1, 3, 2};
  CHECK(monotone);
  CHECK(solution_cost(sub, sol) == doctest::Approx(60.0));
}

TEST_CASE("savings formula and symmetry") {
  // c(A, 0) = 4, c(0, B) = 5, c(A, B) = 3.
  const auto sub = testing::make_sub({{0, 0}, {4, 0}, {4, 3}}, {});
  CHECK(savings(sub, 1, 2) == doctest::Approx(4 + 5 - 3));
  CHECK(savings(sub, 1, 2) == savings(sub, 2, 1));
}

TEST_CASE("savings merge violating capacity is skipped") {
  const auto sub = testing::make_sub({{0, 0}, {10, 0}, {11, 0}}, {{1, 6, 1, 0, 100}, {2, 6, 1, 0, 100}}, 10);
  CHECK(cws(sub).size() == 2);
}

TEST_CASE("random insertion is deterministic per seed") {
  std::mt19937_64 rng(1);
  const auto sub = testing::random_sub(rng, 12);
  CHECK(insertion(sub, InsertionRule::Random, 5) == insertion(sub, InsertionRule::Random, 5));
}

TEST_CASE("every constructor returns feasible routes that dominate the oracle") {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 60; ++k) {
    const auto sub = testing::random_sub(rng, 2 + k % 5);
    const double best = oracle::exact_subproblem(sub).cost;
    std::vector<SubSolution> sols{nearest_neighbor(sub), cws(sub)};
    for (auto rule : {InsertionRule::Random, InsertionRule::Nearest, InsertionRule::Farthest}) {
      sols.push_back(insertion(sub, rule, static_cast<std::uint64_t>(k)));
    }
    for (const auto& sol : sols) {
      REQUIRE(solution_feasible(sub, sol));
      CHECK(solution_cost(sub, sol) >= best - 1e-9);
      CHECK(env::tour_cost(sub, to_actions(sub, sol)) == doctest::Approx(solution_cost(sub, sol)));
    }
  }
}

TEST_CASE("constructors continue resumed vehicles") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 30; ++k) {
    auto sub = testing::random_sub(rng, 6);
    sub.release_time = 5.0;
    sub.vehicles = {{2, 4, 7.0}, {kDepotGate, 10, 5.0}};
    for (auto& f : sub.flights) f.window_end += 40.0;
    std::vector<SubSolution> sols{nearest_neighbor(sub), cws(sub),
                                  insertion(sub, InsertionRule::Farthest, 1)};
    for (const auto& sol : sols) {
      REQUIRE(solution_feasible(sub, sol));
      CHECK(sol[0].vehicle == 0);
      CHECK(sol[1].vehicle == 1);
    }
  }
}

#include <doctest.h>

#include <random>

#include "agh/env.h"
#include "agh/model.h"
#include "support.h"

using namespace agh;
using testing::FlightSpec;

namespace {

// Depot at origin, gate g at x = 5 * g, speed 1.
SubProblem line_sub(const std::vector<FlightSpec>& flights, int capacity = 10) {
  std::vector<Point> gates{{0, 0}};
  for (int g = 1; g <= 4; ++g) gates.push_back({5.0 * g, 0});
  return testing::make_sub(gates, flights, capacity, 1.0);
}

} // namespace

TEST_CASE("reset starts a full vehicle at the depot") {
  const auto sub = line_sub({{1, 3, 4, 0, 100}});
  const auto s = env::reset(sub);
  CHECK(s.capacity_left() == 1.0);
  CHECK(s.clock == 0.0);
  CHECK(s.last_node == kDepotNode);
  CHECK(!s.done());
  const auto mask = env::feasible_mask(s);
  CHECK(mask[0] == 0);
  CHECK(mask[1] == 1);
}

TEST_CASE("empty sub-problem terminates immediately") {
  const auto sub = line_sub({});
  const auto s = env::reset(sub);
  CHECK(s.done());
  CHECK(env::tour_cost(sub, std::vector<int>{}) == 0.0);
}

TEST_CASE("capacity masking") {
  // Capacity 10; demand 4 (0.4) with 3 units (0.3) left is masked.
  const auto sub = line_sub({{1, 7, 1, 0, 100}, {2, 4, 1, 0, 100}});
  auto s = env::reset(sub);
  env::apply(s, 1);
  CHECK(s.capacity_left() == doctest::Approx(0.3));
  const auto mask = env::feasible_mask(s);
  CHECK(mask[2] == 0);
  CHECK(mask[0] == 1);
}

TEST_CASE("completion-by-window masking") {
  // FT = 10, travel 5, a = 20, d = 4, b = 23: completion 24 > 23.
  const auto sub = line_sub({{1, 1, 1, 0, 100}, {2, 1, 4, 20, 23}});
  auto s = env::reset(sub);
  s.clock = 10.0;
  s.last_node = 1;
  s.last_gate = 1;
  s.served[1] = 1;
  s.n_served = 1;
  const auto mask = env::feasible_mask(s);
  CHECK(mask[2] == 0);
}

TEST_CASE("transitions update capacity and clock") {
  // FT = 10, travel 5, a = 3, d = 4 -> FT = 19.
  const auto sub = line_sub({{1, 3, 1, 0, 100}, {2, 3, 4, 3, 100}, {3, 1, 1, 0, 100}});
  auto s = env::reset(sub);
  s.clock = 10.0;
  s.last_node = 1;
  s.last_gate = 1;
  s.served[1] = 1;
  s.n_served = 1;
  s.remaining = 10;
  env::apply(s, 2);
  CHECK(s.clock == 19.0);
  CHECK(s.capacity_left() == doctest::Approx(0.7));
  env::apply(s, 0);
  CHECK(s.clock == 0.0);
  CHECK(s.capacity_left() == 1.0);
}

TEST_CASE("masked actions are rejected") {
  const auto sub = line_sub({{1, 1, 1, 0, 100}});
  auto s = env::reset(sub);
  CHECK_THROWS_AS(env::apply(s, 0), InputError);
}

TEST_CASE("dead end raises an infeasibility error") {
  // Service cannot complete inside the window even from the depot.
  const auto sub = line_sub({{4, 1, 5, 0, 10}});
  const auto s = env::reset(sub);
  CHECK_THROWS_AS(env::feasible_mask(s), InfeasibleError);
}

TEST_CASE("tour cost") {
  // depot -> A -> depot with c(0, A) = 5.
  const auto sub = line_sub({{1, 1, 1, 0, 100}, {3, 1, 1, 0, 100}});
  CHECK(env::tour_cost(sub, std::vector<int>{1, 0, 2}) == doctest::Approx(10.0 + 30.0));
  CHECK(env::tour_cost(sub, std::vector<int>{1, 2}) == doctest::Approx(30.0));
  CHECK_THROWS_AS(env::tour_cost(sub, std::vector<int>{1}), InputError);
}

TEST_CASE("random episodes respect the rules the mask promises") {
  std::mt19937_64 rng(42);
  for (int episode = 0; episode < 3000; ++episode) {
    const auto sub = testing::random_sub(rng, 1 + episode % 7);
    auto s = env::reset(sub);
    int steps = 0;
    while (!s.done()) {
      const auto mask = env::feasible_mask(s);
      std::vector<int> open;
      for (int a = 0; a < static_cast<int>(mask.size()); ++a) {
        if (mask[static_cast<std::size_t>(a)]) open.push_back(a);
      }
      REQUIRE(!open.empty());
      const int a = open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)];
      const auto before = s;
      env::apply(s, a, mask);
      if (a != kDepotNode) {
        const auto& f = sub.flight(a);
        REQUIRE(f.demand <= before.remaining);
        REQUIRE(s.clock <= f.window_end);
        REQUIRE(s.clock - f.duration >= f.window_start);
      }
      ++steps;
    }
    CHECK(steps <= 2 * sub.size() + 1);
    // Identical actions replay to the identical state.
    auto again = env::reset(sub);
    for (int a : s.actions) env::apply(again, a);
    CHECK(again.clock == s.clock);
    CHECK(again.cost == s.cost);
    const double cost = env::tour_cost(sub, s.actions);
    CHECK(cost == solution_cost(sub, from_actions(sub, s.actions)));
  }
}

TEST_CASE("episode cost equals the global cost of the single-fleet solution") {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 20; ++k) {
    const auto inst = testing::generated_subset(5, 1, 100 + static_cast<std::uint64_t>(k));
    const auto& op = inst.operations().front();
    SubProblem sub;
    sub.op_id = op.op_id;
    sub.capacity = inst.fleet(op.op_id).capacity;
    sub.speed = inst.fleet(op.op_id).speed;
    sub.metric = inst.metric();
    for (const auto& f : inst.flights()) {
      sub.flights.push_back({f.flight_id, f.gate_id, f.demand.at(op.op_id), op.duration(f.flight_type),
                             f.arrival, f.departure, {{f.arrival, f.departure}}});
    }
    auto s = env::reset(sub);
    while (!s.done()) {
      const auto mask = env::feasible_mask(s);
      std::vector<int> open;
      for (int a = 0; a < static_cast<int>(mask.size()); ++a) {
        if (mask[static_cast<std::size_t>(a)]) open.push_back(a);
      }
      env::apply(s, open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)], mask);
    }
    GlobalSolution sol;
    for (const auto& r : from_actions(sub, s.actions)) {
      Route route{op.op_id, {}, {}};
      for (int node : r.nodes) route.visits.push_back(sub.flight(node).flight_id);
      sol.routes.push_back(route);
    }
    CHECK(env::tour_cost(sub, s.actions) == doctest::Approx(global_cost(inst, sol)).epsilon(1e-12));
  }
}

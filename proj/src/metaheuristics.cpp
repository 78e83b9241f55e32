#include "agh/metaheuristics.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "agh/heuristics.h"

namespace agh::meta {

namespace {

using Clock = std::chrono::steady_clock;

class Deadline {
public:
  explicit Deadline(double seconds)
    : active_(seconds > 0.0),
      end_(Clock::now() + std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(seconds > 0.0 ? seconds : 0.0))) {}
  bool passed() const { return active_ && Clock::now() >= end_; }

private:
  bool active_;
  Clock::time_point end_;
};

bool metropolis(double delta, double temperature, std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (delta <= 0.0) {
    return true;
  }
  return temperature > 0.0 && u < std::exp(-delta / temperature);
}

struct Slot {
  int route;
  int pos;
};

} // namespace

SubSolution simulated_annealing(const SubProblem& sub, const SaParams& p, std::uint64_t seed,
                                Trace* trace) {
  std::mt19937_64 rng(seed);
  const Deadline deadline(p.time_limit);
  SubSolution current = heuristics::nearest_neighbor(sub);
  std::vector<double> route_cost;
  for (const auto& r : current) {
    route_cost.push_back(replay_route(sub, r).cost);
  }
  double cost = solution_cost(sub, current);
  SubSolution best = current;
  double best_cost = cost;
  double temperature = p.t0;

  std::vector<Slot> slots;
  std::vector<std::pair<int, int>> pairs;
  SubRoute trial_a;
  SubRoute trial_b;
  for (int iter = 0; iter < p.max_iter && !deadline.passed(); ++iter) {
    slots.clear();
    for (int r = 0; r < static_cast<int>(current.size()); ++r) {
      for (int k = 0; k < static_cast<int>(current[static_cast<std::size_t>(r)].nodes.size()); ++k) {
        slots.push_back({r, k});
      }
    }
    pairs.clear();
    for (int a = 0; a < static_cast<int>(slots.size()); ++a) {
      for (int b = a + 1; b < static_cast<int>(slots.size()); ++b) {
        pairs.emplace_back(a, b);
      }
    }
    if (pairs.empty()) {
      break;
    }
    std::shuffle(pairs.begin(), pairs.end(), rng);

    int found = 0;
    double best_delta = std::numeric_limits<double>::infinity();
    std::pair<int, int> best_pair{-1, -1};
    for (const auto& [a, b] : pairs) {
      if (found >= p.neighborhood_size || deadline.passed()) {
        break;
      }
      const Slot sa = slots[static_cast<std::size_t>(a)];
      const Slot sb = slots[static_cast<std::size_t>(b)];
      double delta = 0.0;
      if (sa.route == sb.route) {
        trial_a = current[static_cast<std::size_t>(sa.route)];
        std::swap(trial_a.nodes[static_cast<std::size_t>(sa.pos)],
                  trial_a.nodes[static_cast<std::size_t>(sb.pos)]);
        const auto rep = replay_route(sub, trial_a);
        if (!rep.feasible) continue;
        delta = rep.cost - route_cost[static_cast<std::size_t>(sa.route)];
      } else {
        trial_a = current[static_cast<std::size_t>(sa.route)];
        trial_b = current[static_cast<std::size_t>(sb.route)];
        std::swap(trial_a.nodes[static_cast<std::size_t>(sa.pos)],
                  trial_b.nodes[static_cast<std::size_t>(sb.pos)]);
        const auto ra = replay_route(sub, trial_a);
        if (!ra.feasible) continue;
        const auto rb = replay_route(sub, trial_b);
        if (!rb.feasible) continue;
        delta = ra.cost + rb.cost - route_cost[static_cast<std::size_t>(sa.route)] -
                route_cost[static_cast<std::size_t>(sb.route)];
      }
      ++found;
      if (delta < best_delta) {
        best_delta = delta;
        best_pair = {a, b};
      }
    }
    if (found > 0 && metropolis(best_delta, temperature, rng)) {
      const Slot sa = slots[static_cast<std::size_t>(best_pair.first)];
      const Slot sb = slots[static_cast<std::size_t>(best_pair.second)];
      std::swap(current[static_cast<std::size_t>(sa.route)].nodes[static_cast<std::size_t>(sa.pos)],
                current[static_cast<std::size_t>(sb.route)].nodes[static_cast<std::size_t>(sb.pos)]);
      route_cost[static_cast<std::size_t>(sa.route)] =
        replay_route(sub, current[static_cast<std::size_t>(sa.route)]).cost;
      route_cost[static_cast<std::size_t>(sb.route)] =
        replay_route(sub, current[static_cast<std::size_t>(sb.route)]).cost;
      cost = solution_cost(sub, current);
      if (cost < best_cost) {
        best_cost = cost;
        best = current;
      }
    }
    temperature *= p.cooling;
    if (trace) {
      trace->incumbent.push_back(cost);
      trace->best.push_back(best_cost);
    }
  }
  return best;
}

int removal_count(int n_flights, double fraction) {
  return std::min(n_flights, static_cast<int>(std::ceil(fraction * n_flights - 1e-12)));
}

namespace {

SubSolution run_lns(const SubProblem& sub, const LnsParams& p, std::uint64_t seed, Trace* trace) {
  std::mt19937_64 rng(seed);
  const Deadline deadline(p.total_time_limit);
  SubSolution current = heuristics::nearest_neighbor(sub);
  double cost = solution_cost(sub, current);
  SubSolution best = current;
  double best_cost = cost;
  double temperature = p.t0;
  const int k = removal_count(sub.size(), p.destroy_fraction);

  std::vector<int> removed;
  for (int iter = 0; iter < p.max_iter && !deadline.passed() && k > 0; ++iter) {
    SubSolution cand = current;
    std::vector<int> all;
    for (int j = 1; j <= sub.size(); ++j) all.push_back(j);
    std::shuffle(all.begin(), all.end(), rng);
    removed.assign(all.begin(), all.begin() + k);
    for (auto& r : cand) {
      std::erase_if(r.nodes, [&](int node) {
        return std::find(removed.begin(), removed.end(), node) != removed.end();
      });
    }
    std::erase_if(cand, [](const SubRoute& r) { return r.vehicle < 0 && r.nodes.empty(); });
    std::shuffle(removed.begin(), removed.end(), rng);

    // Removing visits can break a route only through waiting, which the
    // replay rules never penalize, so the partial solution stays feasible.
    const Deadline repair_deadline(p.iter_time_limit);
    bool ok = true;
    for (int node : removed) {
      if (repair_deadline.passed()) {
        ok = false;
        break;
      }
      try {
        heuristics::insert_cheapest(sub, cand, node);
      } catch (const InfeasibleError&) {
        ok = false;
        break;
      }
    }
    if (ok) {
      cand = heuristics::normalized(sub, std::move(cand));
      const double c = solution_cost(sub, cand);
      const bool accept = p.acceptance == Acceptance::Greedy
                            ? c < cost
                            : metropolis(c - cost, temperature, rng);
      if (accept) {
        current = std::move(cand);
        cost = c;
        if (cost < best_cost) {
          best_cost = cost;
          best = current;
        }
      }
    }
    if (p.acceptance == Acceptance::Metropolis && (iter + 1) % p.cooling_every == 0) {
      temperature *= p.cooling;
    }
    if (trace) {
      trace->incumbent.push_back(cost);
      trace->best.push_back(best_cost);
    }
  }
  return best;
}

} // namespace

SubSolution lns(const SubProblem& sub, const LnsParams& p, std::uint64_t seed, Trace* trace) {
  return run_lns(sub, p, seed, trace);
}

SubSolution lns_sa(const SubProblem& sub, LnsParams p, std::uint64_t seed, Trace* trace) {
  p.acceptance = Acceptance::Metropolis;
  return run_lns(sub, p, seed, trace);
}

} // namespace agh::meta

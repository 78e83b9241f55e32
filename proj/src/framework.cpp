#include "agh/framework.h"

#include <algorithm>
#include <limits>
#include <set>

#include "agh/parallel.h"

namespace agh::framework {

std::vector<std::vector<int>> group_by_level(const std::vector<OperationSpec>& ops) {
  std::map<int, std::vector<int>> by_level;
  for (const auto& op : ops) {
    by_level[op.level].push_back(op.op_id);
  }
  std::vector<std::vector<int>> groups;
  int expected = 0;
  for (auto& [level, ids] : by_level) {
    if (level != expected++) {
      throw InputError("precedence levels must be contiguous from 0");
    }
    std::sort(ids.begin(), ids.end());
    groups.push_back(std::move(ids));
  }
  return groups;
}

double window_start(const Flight& flight, int level, const std::vector<double>& upstream_completions) {
  if (level == 0) {
    return flight.arrival;
  }
  if (upstream_completions.empty()) {
    throw InputError("missing upstream completion for flight " + std::to_string(flight.flight_id));
  }
  return *std::max_element(upstream_completions.begin(), upstream_completions.end());
}

double window_end(const Instance& inst, const std::vector<std::vector<int>>& groups,
                  const Flight& flight, int level) {
  double end = flight.departure;
  for (std::size_t later = static_cast<std::size_t>(level) + 1; later < groups.size(); ++later) {
    double longest = 0.0;
    for (int op_id : groups[later]) {
      longest = std::max(longest, inst.operation(op_id).duration(flight.flight_type));
    }
    end -= longest;
  }
  return end;
}

std::vector<double> completion_times(const SubProblem& sub, const SubSolution& routes) {
  std::vector<double> done(static_cast<std::size_t>(sub.size()),
                           std::numeric_limits<double>::quiet_NaN());
  for (const auto& route : routes) {
    const auto replay = replay_route(sub, route);
    if (!replay.feasible) {
      throw InfeasibleError("infeasible route for op " + std::to_string(sub.op_id));
    }
    for (std::size_t k = 0; k < route.nodes.size(); ++k) {
      done[static_cast<std::size_t>(route.nodes[k] - 1)] = replay.completions[k];
    }
  }
  return done;
}

SubProblem make_subproblem(const Instance& inst, int op_id, int level,
                           const std::vector<int>& flights,
                           const std::vector<std::vector<std::array<double, 2>>>& window_history) {
  const auto& fleet = inst.fleet(op_id);
  const auto& op = inst.operation(op_id);
  SubProblem sub;
  sub.op_id = op_id;
  sub.fleet_index = inst.fleet_index(op_id);
  sub.level = level;
  sub.capacity = fleet.capacity;
  sub.speed = fleet.speed;
  sub.horizon = inst.horizon();
  sub.metric = inst.metric();
  sub.flights.reserve(flights.size());
  for (std::size_t k = 0; k < flights.size(); ++k) {
    const auto& f = inst.flight(flights[k]);
    SubFlight sf;
    sf.flight_id = f.flight_id;
    sf.gate = f.gate_id;
    sf.demand = f.demand.at(op_id);
    sf.duration = op.duration(f.flight_type);
    sf.window_history = window_history[k];
    sf.window_start = sf.window_history.back()[0];
    sf.window_end = sf.window_history.back()[1];
    sub.flights.push_back(std::move(sf));
  }
  return sub;
}

Stepper::Stepper(const Instance& inst, const Residual* residual)
  : inst_(&inst),
    residual_(residual),
    groups_(group_by_level(inst.operations())),
    clock_(residual ? residual->clock : 0.0),
    history_(static_cast<std::size_t>(inst.num_flights()) + 1) {
  if (residual) {
    completion_ = residual->fixed_completion;
  }
}

std::vector<SubProblem> Stepper::pose() {
  if (done()) {
    throw InputError("all levels already solved");
  }
  const auto& inst = *inst_;
  const int level = level_;
  const auto& group = groups_[static_cast<std::size_t>(level)];
  if (posed_ != level) {
    for (const auto& f : inst.flights()) {
      std::vector<double> upstream;
      if (level > 0) {
        for (int op_id : groups_[static_cast<std::size_t>(level - 1)]) {
          upstream.push_back(completion_.at({f.flight_id, op_id}));
        }
      }
      const double a = std::max(window_start(f, level, upstream), clock_);
      const double b = window_end(inst, groups_, f, level);
      history_[static_cast<std::size_t>(f.flight_id)].push_back({a, b});
    }
    posed_ = level;
  }

  std::vector<SubProblem> subs;
  for (int op_id : group) {
    std::vector<int> ids;
    std::vector<std::vector<std::array<double, 2>>> hist;
    for (const auto& f : inst.flights()) {
      if (residual_ && residual_->fixed_completion.contains({f.flight_id, op_id})) {
        continue;
      }
      const auto& h = history_[static_cast<std::size_t>(f.flight_id)];
      if (h.back()[0] > h.back()[1]) {
        throw InfeasibleError("empty time window for flight " + std::to_string(f.flight_id) +
                              " at level " + std::to_string(level));
      }
      ids.push_back(f.flight_id);
      hist.push_back(h);
    }
    auto sub = make_subproblem(inst, op_id, level, ids, hist);
    if (residual_) {
      sub.release_time = clock_;
      if (auto it = residual_->vehicles.find(op_id); it != residual_->vehicles.end()) {
        sub.vehicles = it->second;
      }
    }
    subs.push_back(std::move(sub));
  }
  return subs;
}

void Stepper::commit(std::vector<FleetPlan> plans) {
  if (done() || posed_ != level_) {
    throw InputError("commit without a posed level");
  }
  if (plans.size() != groups_[static_cast<std::size_t>(level_)].size()) {
    throw InputError("one plan per operation of the level is required");
  }
  for (auto& plan : plans) {
    if (!solution_feasible(plan.sub, plan.routes)) {
      throw InfeasibleError("sub-solver returned an infeasible solution for op " +
                            std::to_string(plan.sub.op_id));
    }
    plan.replays.clear();
    for (const auto& r : plan.routes) {
      plan.replays.push_back(replay_route(plan.sub, r));
    }
  }
  for (auto& plan : plans) {
    for (std::size_t r = 0; r < plan.routes.size(); ++r) {
      const auto& route = plan.routes[r];
      const auto& replay = plan.replays[r];
      for (std::size_t k = 0; k < route.nodes.size(); ++k) {
        completion_[{plan.sub.flight(route.nodes[k]).flight_id, plan.sub.op_id}] =
          replay.completions[k];
      }
    }
    plans_.push_back(std::move(plan));
  }
  ++level_;
}

RunResult Stepper::finish() {
  if (!done()) {
    throw InputError("levels remain unsolved");
  }
  RunResult result;
  result.plans = std::move(plans_);
  for (const auto& plan : result.plans) {
    for (std::size_t r = 0; r < plan.routes.size(); ++r) {
      const auto& route = plan.routes[r];
      if (route.nodes.empty()) {
        continue;
      }
      Route out;
      out.op_id = plan.sub.op_id;
      for (int node : route.nodes) {
        out.visits.push_back(plan.sub.flight(node).flight_id);
      }
      out.start_times = plan.replays[r].starts;
      result.solution.routes.push_back(std::move(out));
    }
  }
  result.solution.objective = global_cost(*inst_, result.solution);
  return result;
}

RunResult run(const Instance& inst, const SubSolver& solver, const SolveOptions& opts) {
  Stepper stepper(inst, opts.residual);
  while (!stepper.done()) {
    auto subs = stepper.pose();
    if (opts.observe) {
      for (const auto& sub : subs) {
        opts.observe(sub);
      }
    }
    std::vector<FleetPlan> plans(subs.size());
    parallel_for(static_cast<int>(subs.size()), opts.threads, [&](int k) {
      auto& plan = plans[static_cast<std::size_t>(k)];
      plan.sub = std::move(subs[static_cast<std::size_t>(k)]);
      plan.routes = solver(plan.sub);
    });
    stepper.commit(std::move(plans));
  }
  return stepper.finish();
}

GlobalSolution solve(const Instance& inst, const SubSolver& solver, const SolveOptions& opts) {
  return run(inst, solver, opts).solution;
}

} // namespace agh::framework

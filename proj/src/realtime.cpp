#include "agh/realtime.h"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "agh/heuristics.h"

namespace agh::realtime {

namespace {

Instance with_flights(const Instance& base, std::vector<Flight> flights) {
  auto fleets = base.fleets();
  for (auto& [id, f] : fleets) {
    f.max_vehicles = std::max(f.max_vehicles, static_cast<int>(flights.size()));
  }
  return Instance(std::move(flights), base.operations(), std::move(fleets), base.gate_positions());
}

enum class RouteState { Open, Resumed, Closed };

// Open: nothing started. Resumed: started, with work left. Closed: every
// visit started; the vehicle heads back to the depot afterwards.
RouteState state_of(const Route& r, double clock, std::size_t& started) {
  started = 0;
  while (started < r.start_times.size() && r.start_times[started] < clock) ++started;
  if (started == 0) return RouteState::Open;
  return started == r.visits.size() ? RouteState::Closed : RouteState::Resumed;
}

struct Replan {
  GlobalSolution plan;
  int frozen = 0;
  int pending = 0;
};

// Re-optimizes `inst` at `clock` keeping every service of `prev` that has
// started. Throws InfeasibleError when the solver cannot complete the plan.
Replan replan(const Instance& inst, const GlobalSolution& prev, double clock,
              const framework::SubSolver& solver, int threads) {
  framework::Residual residual;
  residual.clock = clock;
  std::vector<Route> kept;                    // closed and resumed routes, in prior order
  std::map<int, std::vector<std::size_t>> resumed; // op -> indices into kept
  int frozen = 0;
  for (const auto& r : prev.routes) {
    std::size_t started = 0;
    const auto state = state_of(r, clock, started);
    if (state == RouteState::Open) continue;
    const auto& op = inst.operation(r.op_id);
    int load = 0;
    for (std::size_t k = 0; k < started; ++k) {
      const auto& f = inst.flight(r.visits[k]);
      residual.fixed_completion[{f.flight_id, r.op_id}] =
        r.start_times[k] + op.duration(f.flight_type);
      load += f.demand.at(r.op_id);
    }
    frozen += static_cast<int>(started);
    Route prefix{r.op_id, {r.visits.begin(), r.visits.begin() + static_cast<std::ptrdiff_t>(started)},
                 {r.start_times.begin(), r.start_times.begin() + static_cast<std::ptrdiff_t>(started)}};
    if (state == RouteState::Resumed) {
      const auto& last = inst.flight(prefix.visits.back());
      VehicleStart v;
      v.gate = last.gate_id;
      v.remaining = inst.fleet(r.op_id).capacity - load;
      v.clock = residual.fixed_completion.at({last.flight_id, r.op_id});
      residual.vehicles[r.op_id].push_back(v);
      resumed[r.op_id].push_back(kept.size());
    }
    kept.push_back(std::move(prefix));
  }

  framework::SolveOptions opts;
  opts.threads = threads;
  opts.residual = &residual;
  const auto run = framework::run(inst, solver, opts);

  Replan out;
  out.frozen = frozen;
  std::vector<Route> fresh;
  for (const auto& plan : run.plans) {
    out.pending += plan.sub.size();
    for (std::size_t r = 0; r < plan.routes.size(); ++r) {
      const auto& route = plan.routes[r];
      Route* target = nullptr;
      Route added{plan.sub.op_id, {}, {}};
      if (route.vehicle >= 0) {
        target = &kept[resumed.at(plan.sub.op_id)[static_cast<std::size_t>(route.vehicle)]];
      } else if (!route.nodes.empty()) {
        target = &added;
      } else {
        continue;
      }
      for (std::size_t k = 0; k < route.nodes.size(); ++k) {
        target->visits.push_back(plan.sub.flight(route.nodes[k]).flight_id);
        target->start_times.push_back(plan.replays[r].starts[k]);
      }
      if (route.vehicle < 0) fresh.push_back(std::move(added));
    }
  }
  out.plan.routes = std::move(kept);
  for (auto& r : fresh) out.plan.routes.push_back(std::move(r));
  out.plan.objective = global_cost(inst, out.plan);
  return out;
}

} // namespace

Stream split(const Instance& full, int n_initial) {
  if (n_initial < 0 || n_initial > full.num_flights()) {
    throw InputError("initial flight count outside 0..n");
  }
  std::vector<Flight> init(full.flights().begin(), full.flights().begin() + n_initial);
  Stream s{with_flights(full, init), {}};
  for (int k = n_initial; k < full.num_flights(); ++k) {
    s.future.push_back(full.flights()[static_cast<std::size_t>(k)]);
  }
  std::stable_sort(s.future.begin(), s.future.end(),
                   [](const Flight& a, const Flight& b) { return a.arrival < b.arrival; });
  return s;
}

std::vector<Prefix> frozen_prefixes(const GlobalSolution& plan, double clock) {
  std::vector<Prefix> out;
  for (const auto& r : plan.routes) {
    std::size_t started = 0;
    if (state_of(r, clock, started) == RouteState::Open) continue;
    out.push_back({r.op_id,
                   {r.visits.begin(), r.visits.begin() + static_cast<std::ptrdiff_t>(started)},
                   {r.start_times.begin(), r.start_times.begin() + static_cast<std::ptrdiff_t>(started)}});
  }
  return out;
}

SimResult simulate(const Stream& stream, const framework::SubSolver& solver, const Options& opts) {
  for (std::size_t k = 1; k < stream.future.size(); ++k) {
    if (stream.future[k].arrival < stream.future[k - 1].arrival) {
      throw InputError("stream flights must be sorted by arrival");
    }
  }
  SimResult res;
  std::vector<Flight> known = stream.initial.flights();
  for (std::size_t k = 0; k < known.size(); ++k) {
    if (known[k].flight_id != static_cast<int>(k) + 1) {
      throw InputError("initial flight ids must be 1..n in order");
    }
  }
  res.reveal_time.assign(known.size(), 0.0);
  Instance inst = with_flights(stream.initial, known);
  framework::SolveOptions first;
  first.threads = opts.threads;
  GlobalSolution plan = framework::solve(inst, solver, first);
  res.plans.push_back(plan);

  std::size_t next = 0;
  while (next < stream.future.size()) {
    const double first_time = stream.future[next].arrival;
    std::size_t end = next;
    while (end < stream.future.size() &&
           stream.future[end].arrival <= first_time + opts.batch_window) {
      ++end;
    }
    const double clock = stream.future[end - 1].arrival;

    // Flights that cannot be served even on an empty apron are rejected.
    std::vector<std::size_t> candidates;
    for (std::size_t k = next; k < end; ++k) {
      Flight f = stream.future[k];
      f.flight_id = 1;
      const Instance alone = with_flights(stream.initial, {f});
      framework::Residual r;
      r.clock = clock;
      framework::SolveOptions o;
      o.residual = &r;
      try {
        framework::solve(alone, heuristics::nearest_neighbor, o);
        candidates.push_back(k);
      } catch (const InfeasibleError& e) {
        res.rejected.push_back({static_cast<int>(k), clock, e.what()});
      }
    }

    Event ev;
    ev.time = clock;
    ev.revealed = static_cast<int>(end - next);
    const double before = plan.objective;
    // Drop new flights from the back until the re-optimization succeeds.
    while (true) {
      std::vector<Flight> trial = known;
      for (std::size_t k : candidates) {
        Flight f = stream.future[k];
        f.flight_id = static_cast<int>(trial.size()) + 1;
        trial.push_back(std::move(f));
      }
      if (candidates.empty()) {
        const auto frozen = frozen_prefixes(plan, clock);
        for (const auto& p : frozen) ev.frozen += static_cast<int>(p.visits.size());
        break;
      }
      Instance trial_inst = with_flights(stream.initial, trial);
      try {
        auto rp = replan(trial_inst, plan, clock, solver, opts.threads);
        known = std::move(trial);
        inst = std::move(trial_inst);
        plan = std::move(rp.plan);
        ev.frozen = rp.frozen;
        ev.pending = rp.pending;
        for (std::size_t k : candidates) res.reveal_time.push_back(stream.future[k].arrival);
        break;
      } catch (const InfeasibleError& e) {
        res.rejected.push_back({static_cast<int>(candidates.back()), clock,
                                std::string("re-optimization failed: ") + e.what()});
        candidates.pop_back();
      }
    }
    ev.rejected = ev.revealed - static_cast<int>(candidates.size());
    ev.objective = plan.objective;
    ev.incremental = plan.objective - before;
    res.frozen.push_back(frozen_prefixes(res.plans.back(), clock));
    res.plans.push_back(plan);
    res.events.push_back(ev);
    next = end;
  }
  std::stable_sort(res.rejected.begin(), res.rejected.end(),
            [](const Rejection& a, const Rejection& b) { return a.stream_index < b.stream_index; });
  res.instance = std::move(inst);
  res.solution = std::move(plan);
  return res;
}

std::string events_csv(const std::vector<Event>& events) {
  std::ostringstream out;
  out << "time,revealed,rejected,frozen,pending,objective,incremental_cost\n";
  char buf[256];
  for (const auto& e : events) {
    std::snprintf(buf, sizeof buf, "%.6f,%d,%d,%d,%d,%.6f,%.6f\n", e.time, e.revealed, e.rejected,
                  e.frozen, e.pending, e.objective, e.incremental);
    out << buf;
  }
  return out.str();
}

} // namespace agh::realtime

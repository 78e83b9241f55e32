#pragma once

#include <string>
#include <vector>

#include "agh/framework.h"
#include "agh/model.h"

namespace agh::realtime {

// Flights known at time 0 plus flights revealed later. A future flight is
// revealed at its arrival time.
struct Stream {
  Instance initial;
  std::vector<Flight> future; // sorted by arrival
};

// Splits a full instance: flights 1..n_initial are known up front, the rest
// arrive over time.
Stream split(const Instance& full, int n_initial);

struct Options {
  // Reveals within this many minutes of the first pending one are handled
  // by a single re-optimization at the last reveal time.
  double batch_window = 0.0;
  int threads = 1;
};

// Visits of one route that had started before an event's clock.
struct Prefix {
  int op_id = 0;
  std::vector<int> visits;
  std::vector<double> starts;

  bool operator==(const Prefix&) const = default;
};

struct Event {
  double time = 0.0;
  int revealed = 0;
  int rejected = 0;
  int frozen = 0;  // (flight, op) services fixed at this event
  int pending = 0; // services re-planned at this event
  double objective = 0.0;
  double incremental = 0.0; // objective change caused by the event
};

struct Rejection {
  int stream_index = 0; // position in Stream::future
  double time = 0.0;
  std::string reason;
};

struct SimResult {
  Instance instance;        // accepted flights, ids in acceptance order
  GlobalSolution solution;  // final stitched plan
  std::vector<double> reveal_time; // per flight id (index id - 1)
  std::vector<GlobalSolution> plans;         // initial plan, then after each event
  std::vector<std::vector<Prefix>> frozen;   // per event
  std::vector<Event> events;
  std::vector<Rejection> rejected;
};

// Route prefixes of `plan` whose services started strictly before `clock`.
std::vector<Prefix> frozen_prefixes(const GlobalSolution& plan, double clock);

// Rolling-horizon simulation: solve the initial flights, then at every
// reveal freeze the services already started, and re-optimize the rest
// together with the new flights. Vehicles in the middle of a route resume
// from their last frozen gate with their residual capacity and clock.
SimResult simulate(const Stream& stream, const framework::SubSolver& solver,
                   const Options& opts = {});

std::string events_csv(const std::vector<Event>& events);

} // namespace agh::realtime

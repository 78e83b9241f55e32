#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "agh/config.h"
#include "agh/model.h"

namespace agh::instgen {

enum class DemandDist { Uniform19, Gaussian, Poisson };
enum class ArrivalDist { Empirical, Gaussian, Poisson };

DemandDist parse_demand_dist(const std::string& name);
ArrivalDist parse_arrival_dist(const std::string& name);

inline constexpr std::array<double, kFlightTypes> kTurnaroundMinutes{30.0, 34.0, 33.0};

struct GenConfig {
  int n_flights = 20;
  int n_gates = 91;
  int n_terminals = 3;
  int capacity = 0; // 0: derived from n_flights, see default_capacity()
  DemandDist demand_dist = DemandDist::Uniform19;
  ArrivalDist arrival_dist = ArrivalDist::Empirical;
  std::uint64_t seed = 0;

  double speed = 400.0; // distance units (m) per minute
  std::map<std::string, double> speed_by_op; // per operation name, overrides speed
  std::vector<OperationSpec> operations; // empty: default_operations()
  std::array<double, 24> arrival_histogram{}; // all zero: built-in table

  // Applies "[gen]", "[durations]" and "[speed]" sections of a key-value
  // config; keys absent from the file keep their current value.
  void apply(const Config& cfg);
};

// Vehicle capacity per fleet for an n-flight instance: 30/40/50/60/70 for
// up to 20/50/100/200/300+ flights.
int default_capacity(int n_flights);

// Ten ground operations in four precedence levels with per-type durations
// in minutes.
std::vector<OperationSpec> default_operations();

// Hourly arrival weights of a busy hub (night trough, morning and evening
// banks).
std::array<double, 24> default_arrival_histogram();

// Fixed gate coordinates (meters): depot at index 0 followed by n_gates
// gates laid out along the piers of n_terminals terminals.
std::vector<Point> gate_layout(int n_gates, int n_terminals);

int clamp_demand(double raw, int capacity);
int sample_demand(DemandDist dist, std::mt19937_64& rng);
double sample_arrival(ArrivalDist dist, const std::array<double, 24>& histogram,
                      std::mt19937_64& rng);
std::array<double, 24> hourly_weights(ArrivalDist dist, const std::array<double, 24>& histogram);

Instance generate(const GenConfig& cfg);

} // namespace agh::instgen

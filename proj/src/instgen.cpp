#include "agh/instgen.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace agh::instgen {

DemandDist parse_demand_dist(const std::string& name) {
  if (name == "uniform" || name == "uniform_1_9") {
    return DemandDist::Uniform19;
  }
  if (name == "gaussian") {
    return DemandDist::Gaussian;
  }
  if (name == "poisson") {
    return DemandDist::Poisson;
  }
  throw InputError("unknown demand distribution '" + name + "'");
}

ArrivalDist parse_arrival_dist(const std::string& name) {
  if (name == "empirical" || name == "empirical_changi_like") {
    return ArrivalDist::Empirical;
  }
  if (name == "gaussian") {
    return ArrivalDist::Gaussian;
  }
  if (name == "poisson") {
    return ArrivalDist::Poisson;
  }
  throw InputError("unknown arrival distribution '" + name + "'");
}

int default_capacity(int n_flights) {
  if (n_flights <= 20) {
    return 30;
  }
  if (n_flights <= 50) {
    return 40;
  }
  if (n_flights <= 100) {
    return 50;
  }
  if (n_flights <= 200) {
    return 60;
  }
  return 70;
}

std::vector<OperationSpec> default_operations() {
  return {
    {1, "disembarkation", 0, {5, 7, 6}},
    {2, "portable_water", 0, {4, 5, 5}},
    {3, "baggage_unloading", 0, {6, 8, 7}},
    {4, "fueling", 1, {7, 8, 8}},
    {5, "catering", 1, {6, 8, 7}},
    {6, "cleaning", 1, {5, 7, 6}},
    {7, "lavatory_service", 1, {4, 5, 5}},
    {8, "boarding", 2, {6, 8, 7}},
    {9, "baggage_loading", 2, {5, 7, 6}},
    {10, "pushback", 3, {3, 3, 3}},
  };
}

std::array<double, 24> default_arrival_histogram() {
  return {4, 3, 2, 1, 1, 3, 6, 7, 7, 6, 5, 5, 5, 6, 6, 6, 6, 6, 6, 7, 7, 6, 5, 5};
}

std::vector<Point> gate_layout(int n_gates, int n_terminals) {
  if (n_gates < 1 || n_terminals < 1) {
    throw InputError("gate layout needs at least one gate and one terminal");
  }
  constexpr double kTerminalSpacing = 800.0;
  constexpr double kGateSpacing = 60.0;
  constexpr double kPierHalfWidth = 70.0;

  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n_gates) + 1);
  const double mid = kTerminalSpacing * (n_terminals - 1) / 2.0;
  pts.push_back({mid, -400.0}); // depot

  const int per_terminal = (n_gates + n_terminals - 1) / n_terminals;
  for (int g = 0; g < n_gates; ++g) {
    const int terminal = g / per_terminal;
    const int slot = g % per_terminal;
    const int along = slot / 2;
    const double side = (slot % 2 == 0) ? -1.0 : 1.0;
    pts.push_back({terminal * kTerminalSpacing + side * kPierHalfWidth,
                   100.0 + along * kGateSpacing});
  }
  return pts;
}

int clamp_demand(double raw, int capacity) {
  const long rounded = std::lround(raw);
  return static_cast<int>(std::clamp<long>(rounded, 1, std::max(1, capacity)));
}

int sample_demand(DemandDist dist, std::mt19937_64& rng) {
  switch (dist) {
  case DemandDist::Uniform19:
    return std::uniform_int_distribution<int>(1, 9)(rng);
  case DemandDist::Gaussian: {
    std::normal_distribution<double> normal(5.0, std::sqrt(2.5));
    return clamp_demand(normal(rng), std::numeric_limits<int>::max());
  }
  case DemandDist::Poisson:
    return std::max(1, std::poisson_distribution<int>(5.0)(rng));
  }
  return 1;
}

std::array<double, 24> hourly_weights(ArrivalDist dist, const std::array<double, 24>& histogram) {
  std::array<double, 24> w{};
  switch (dist) {
  case ArrivalDist::Empirical:
    w = histogram;
    break;
  case ArrivalDist::Gaussian:
    // Standard normal density over [-3, 3], one hour per quarter sigma.
    for (int h = 0; h < 24; ++h) {
      const double x = (h + 0.5 - 12.0) / 4.0;
      w[static_cast<std::size_t>(h)] = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    }
    break;
  case ArrivalDist::Poisson: {
    constexpr double lambda = 4.0;
    double pmf = std::exp(-lambda);
    for (int h = 0; h < 24; ++h) {
      w[static_cast<std::size_t>(h)] = pmf;
      pmf *= lambda / (h + 1);
    }
    break;
  }
  }
  return w;
}

double sample_arrival(ArrivalDist dist, const std::array<double, 24>& histogram,
                      std::mt19937_64& rng) {
  const auto w = hourly_weights(dist, histogram);
  std::discrete_distribution<int> hour(w.begin(), w.end());
  const int h = hour(rng);
  const int minute = std::uniform_int_distribution<int>(0, 59)(rng);
  return h * 60.0 + minute;
}

void GenConfig::apply(const Config& cfg) {
  if (auto v = cfg.get_optional<int>("gen.n_flights")) {
    n_flights = *v;
  }
  if (auto v = cfg.get_optional<int>("gen.n_gates")) {
    n_gates = *v;
  }
  if (auto v = cfg.get_optional<int>("gen.n_terminals")) {
    n_terminals = *v;
  }
  if (auto v = cfg.get_optional<int>("gen.capacity")) {
    capacity = *v;
  }
  if (auto v = cfg.get_optional<std::string>("gen.demand")) {
    demand_dist = parse_demand_dist(*v);
  }
  if (auto v = cfg.get_optional<std::string>("gen.arrival")) {
    arrival_dist = parse_arrival_dist(*v);
  }
  if (auto v = cfg.get_optional<std::uint64_t>("gen.seed")) {
    seed = *v;
  }
  if (auto v = cfg.get_optional<double>("gen.speed")) {
    speed = *v;
  }
  if (auto v = cfg.get_optional<std::string>("gen.arrival_histogram")) {
    const auto values = parse_number_list(*v);
    if (values.size() != 24) {
      throw InputError("arrival_histogram needs 24 values");
    }
    std::copy(values.begin(), values.end(), arrival_histogram.begin());
  }
  if (auto speeds = cfg.get_child_optional("speed")) {
    for (const auto& [name, node] : *speeds) {
      speed_by_op[name] = node.get_value<double>();
    }
  }
  if (auto durations = cfg.get_child_optional("durations")) {
    if (operations.empty()) {
      operations = default_operations();
    }
    for (const auto& [name, node] : *durations) {
      auto it = std::find_if(operations.begin(), operations.end(),
                             [&](const OperationSpec& op) { return op.name == name; });
      if (it == operations.end()) {
        throw InputError("durations: unknown operation '" + name + "'");
      }
      const auto values = parse_number_list(node.data());
      if (values.size() != kFlightTypes) {
        throw InputError("durations: '" + name + "' needs one value per flight type");
      }
      std::copy(values.begin(), values.end(), it->duration_by_type.begin());
    }
  }
}

Instance generate(const GenConfig& cfg) {
  if (cfg.n_flights < 0 || cfg.n_gates < 1 || cfg.n_terminals < 1) {
    throw InputError("invalid generator configuration");
  }
  std::mt19937_64 rng(cfg.seed);
  const auto ops = cfg.operations.empty() ? default_operations() : cfg.operations;
  const int capacity = cfg.capacity > 0 ? cfg.capacity : default_capacity(cfg.n_flights);
  const bool has_hist = std::any_of(cfg.arrival_histogram.begin(), cfg.arrival_histogram.end(),
                                    [](double w) { return w > 0.0; });
  const auto histogram = has_hist ? cfg.arrival_histogram : default_arrival_histogram();

  std::vector<Flight> flights;
  flights.reserve(static_cast<std::size_t>(cfg.n_flights));
  for (int k = 0; k < cfg.n_flights; ++k) {
    Flight f;
    f.gate_id = std::uniform_int_distribution<int>(1, cfg.n_gates)(rng);
    f.flight_type = std::uniform_int_distribution<int>(0, kFlightTypes - 1)(rng);
    f.arrival = sample_arrival(cfg.arrival_dist, histogram, rng);
    f.departure = f.arrival + kTurnaroundMinutes[static_cast<std::size_t>(f.flight_type)];
    for (const auto& op : ops) {
      f.demand[op.op_id] = std::min(capacity, sample_demand(cfg.demand_dist, rng));
    }
    flights.push_back(std::move(f));
  }
  std::stable_sort(flights.begin(), flights.end(),
                   [](const Flight& a, const Flight& b) { return a.arrival < b.arrival; });
  for (std::size_t k = 0; k < flights.size(); ++k) {
    flights[k].flight_id = static_cast<int>(k) + 1;
  }

  std::map<int, Fleet> fleets;
  for (const auto& op : ops) {
    const auto sp = cfg.speed_by_op.find(op.name);
    const double speed = sp != cfg.speed_by_op.end() ? sp->second : cfg.speed;
    fleets[op.op_id] = Fleet{op.op_id, capacity, speed, std::max(1, cfg.n_flights)};
  }
  return Instance(std::move(flights), ops, std::move(fleets),
                  gate_layout(cfg.n_gates, cfg.n_terminals));
}

} // namespace agh::instgen

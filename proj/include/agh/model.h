#pragma once

#include <array>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace agh {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed input: unknown ids, bad files, violated preconditions.
class InputError : public Error {
public:
  using Error::Error;
};

// A time window or a routing state that admits no feasible continuation.
class InfeasibleError : public Error {
public:
  using Error::Error;
};

inline constexpr int kSchemaVersion = 1;
inline constexpr int kFlightTypes = 3;
inline constexpr int kDepotGate = 0;
inline constexpr int kDepotNode = 0;

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct OperationSpec {
  int op_id = 0;
  std::string name;
  int level = 0;
  std::array<double, kFlightTypes> duration_by_type{};

  double duration(int flight_type) const {
    return duration_by_type.at(static_cast<std::size_t>(flight_type));
  }
  bool operator==(const OperationSpec&) const = default;
};

struct Flight {
  int flight_id = 0;
  int gate_id = 0;
  int flight_type = 0;
  double arrival = 0.0;
  double departure = 0.0;
  std::map<int, int> demand; // op_id -> units

  bool operator==(const Flight&) const = default;
};

struct Fleet {
  int op_id = 0;
  int capacity = 0;
  double speed = 1.0; // distance units per minute
  int max_vehicles = 0;

  bool operator==(const Fleet&) const = default;
};

// Symmetric Euclidean distance table over gate positions (gate 0 is the
// depot).
class GateMetric {
public:
  explicit GateMetric(const std::vector<Point>& positions);

  double operator()(int gate_a, int gate_b) const {
    return table_[static_cast<std::size_t>(gate_a) * size_ +
                  static_cast<std::size_t>(gate_b)];
  }
  std::size_t size() const { return size_; }

private:
  std::size_t size_;
  std::vector<double> table_;
};

// The full ground-handling problem. Node 0 is the depot and node k (k >= 1)
// is the flight with flight_id k; flights are stored in id order.
class Instance {
public:
  Instance() = default;
  Instance(std::vector<Flight> flights,
           std::vector<OperationSpec> operations,
           std::map<int, Fleet> fleets,
           std::vector<Point> gate_positions);

  const std::vector<Flight>& flights() const { return flights_; }
  const std::vector<OperationSpec>& operations() const { return operations_; }
  const std::map<int, Fleet>& fleets() const { return fleets_; }
  const std::vector<Point>& gate_positions() const { return gate_positions_; }
  const std::shared_ptr<const GateMetric>& metric() const { return metric_; }

  int num_flights() const { return static_cast<int>(flights_.size()); }
  int num_operations() const { return static_cast<int>(operations_.size()); }
  // Number of gate-table rows, depot included.
  int num_gate_slots() const { return static_cast<int>(gate_positions_.size()); }

  const Flight& flight(int flight_id) const;
  const OperationSpec& operation(int op_id) const;
  const Fleet& fleet(int op_id) const;
  // Position of op_id in operations(); used as the fleet embedding row.
  int fleet_index(int op_id) const;

  int node_gate(int node) const;
  double gate_distance(int gate_a, int gate_b) const { return (*metric_)(gate_a, gate_b); }
  double distance(int node_i, int node_j) const {
    return gate_distance(node_gate(node_i), node_gate(node_j));
  }
  // Latest departure; the normalization constant for times.
  double horizon() const;
  int num_levels() const;

  bool operator==(const Instance& other) const;

private:
  std::vector<Flight> flights_;
  std::vector<OperationSpec> operations_;
  std::map<int, Fleet> fleets_;
  std::vector<Point> gate_positions_;
  std::shared_ptr<const GateMetric> metric_;
};

struct Route {
  int op_id = 0;
  std::vector<int> visits;         // flight ids; depot implicit at both ends
  std::vector<double> start_times; // one per visit

  bool operator==(const Route&) const = default;
};

struct GlobalSolution {
  std::vector<Route> routes;
  double objective = 0.0;

  bool operator==(const GlobalSolution&) const = default;
};

struct ValidationReport {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

ValidationReport validate_instance(const Instance& inst);

// Travel time of op_id's fleet between MILP nodes; node n+1 is the sink
// copy of the depot.
double travel_time(const Instance& inst, int op_id, int node_i, int node_j);

// Total distance of all routes including depot legs.
double global_cost(const Instance& inst, const GlobalSolution& sol);

// Distance of a single route (depot -> visits -> depot).
double route_cost(const Instance& inst, const Route& route);

} // namespace agh

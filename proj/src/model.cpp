#include "agh/model.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace agh {

GateMetric::GateMetric(const std::vector<Point>& positions)
  : size_(positions.size()), table_(size_ * size_, 0.0) {
  for (std::size_t a = 0; a < size_; ++a) {
    for (std::size_t b = a + 1; b < size_; ++b) {
      const double dx = positions[a].x - positions[b].x;
      const double dy = positions[a].y - positions[b].y;
      const double d = std::sqrt(dx * dx + dy * dy);
      table_[a * size_ + b] = d;
      table_[b * size_ + a] = d;
    }
  }
}

Instance::Instance(std::vector<Flight> flights,
                   std::vector<OperationSpec> operations,
                   std::map<int, Fleet> fleets,
                   std::vector<Point> gate_positions)
  : flights_(std::move(flights)),
    operations_(std::move(operations)),
    fleets_(std::move(fleets)),
    gate_positions_(std::move(gate_positions)),
    metric_(std::make_shared<const GateMetric>(gate_positions_)) {
}

const Flight& Instance::flight(int flight_id) const {
  if (flight_id < 1 || flight_id > num_flights()) {
    throw InputError("unknown flight id " + std::to_string(flight_id));
  }
  return flights_[static_cast<std::size_t>(flight_id - 1)];
}

const OperationSpec& Instance::operation(int op_id) const {
  for (const auto& op : operations_) {
    if (op.op_id == op_id) {
      return op;
    }
  }
  throw InputError("unknown operation id " + std::to_string(op_id));
}

const Fleet& Instance::fleet(int op_id) const {
  const auto it = fleets_.find(op_id);
  if (it == fleets_.end()) {
    throw InputError("no fleet for operation " + std::to_string(op_id));
  }
  return it->second;
}

int Instance::fleet_index(int op_id) const {
  for (std::size_t k = 0; k < operations_.size(); ++k) {
    if (operations_[k].op_id == op_id) {
      return static_cast<int>(k);
    }
  }
  throw InputError("unknown operation id " + std::to_string(op_id));
}

int Instance::node_gate(int node) const {
  if (node == kDepotNode || node == num_flights() + 1) {
    return kDepotGate;
  }
  return flight(node).gate_id;
}

double Instance::horizon() const {
  double h = 0.0;
  for (const auto& f : flights_) {
    h = std::max(h, f.departure);
  }
  return h > 0.0 ? h : 1.0;
}

int Instance::num_levels() const {
  int levels = 0;
  for (const auto& op : operations_) {
    levels = std::max(levels, op.level + 1);
  }
  return levels;
}

bool Instance::operator==(const Instance& other) const {
  return flights_ == other.flights_ && operations_ == other.operations_ &&
         fleets_ == other.fleets_ && gate_positions_ == other.gate_positions_;
}

ValidationReport validate_instance(const Instance& inst) {
  ValidationReport report;
  auto issue = [&](const std::string& what) { report.issues.push_back(what); };

  std::set<int> op_ids;
  std::set<int> levels;
  for (const auto& op : inst.operations()) {
    if (!op_ids.insert(op.op_id).second) {
      issue("duplicate op_id " + std::to_string(op.op_id));
    }
    if (op.level < 0) {
      issue("negative level for op " + std::to_string(op.op_id));
    }
    levels.insert(op.level);
    for (double d : op.duration_by_type) {
      if (!(d > 0.0)) {
        issue("duration > 0 violated for op " + std::to_string(op.op_id));
        break;
      }
    }
    if (!inst.fleets().contains(op.op_id)) {
      issue("missing fleet for op " + std::to_string(op.op_id));
    }
  }
  if (!levels.empty() &&
      (*levels.begin() != 0 || *levels.rbegin() != static_cast<int>(levels.size()) - 1)) {
    issue("precedence levels not contiguous from 0");
  }

  for (const auto& [op_id, fleet] : inst.fleets()) {
    if (fleet.op_id != op_id) {
      issue("fleet key/op_id mismatch for op " + std::to_string(op_id));
    }
    if (!op_ids.contains(op_id)) {
      issue("fleet for unknown op " + std::to_string(op_id));
    }
    if (!(fleet.speed > 0.0)) {
      issue("speed > 0 violated for fleet " + std::to_string(op_id));
    }
    if (fleet.capacity < 1) {
      issue("capacity >= 1 violated for fleet " + std::to_string(op_id));
    }
    if (fleet.max_vehicles < 1) {
      issue("max_vehicles >= 1 violated for fleet " + std::to_string(op_id));
    }
  }

  if (inst.gate_positions().empty()) {
    issue("gate table missing depot");
  }

  const int n_gates = inst.num_gate_slots();
  for (std::size_t k = 0; k < inst.flights().size(); ++k) {
    const auto& f = inst.flights()[k];
    const std::string tag = "flight " + std::to_string(f.flight_id);
    if (f.flight_id != static_cast<int>(k) + 1) {
      issue(tag + ": flight ids must be 1..n in order");
    }
    if (!(f.arrival < f.departure)) {
      issue(tag + ": arrival/departure order violated");
    }
    if (f.arrival < 0.0) {
      issue(tag + ": negative arrival");
    }
    if (f.gate_id < 1 || f.gate_id >= n_gates) {
      issue(tag + ": gate_id out of range");
    }
    if (f.flight_type < 0 || f.flight_type >= kFlightTypes) {
      issue(tag + ": flight_type out of range");
    }
    for (const auto& op : inst.operations()) {
      const auto it = f.demand.find(op.op_id);
      if (it == f.demand.end()) {
        issue(tag + ": missing demand for op " + std::to_string(op.op_id));
        continue;
      }
      if (it->second < 1) {
        issue(tag + ": demand >= 1 violated for op " + std::to_string(op.op_id));
      }
      const auto fl = inst.fleets().find(op.op_id);
      if (fl != inst.fleets().end() && it->second > fl->second.capacity) {
        issue(tag + ": demand exceeds capacity for op " + std::to_string(op.op_id));
      }
    }
  }
  return report;
}

double travel_time(const Instance& inst, int op_id, int node_i, int node_j) {
  const auto& fleet = inst.fleet(op_id);
  const int sink = inst.num_flights() + 1;
  if (node_i < 0 || node_i > sink || node_j < 0 || node_j > sink) {
    throw InputError("node id out of range");
  }
  if (node_i == node_j || (node_i == kDepotNode && node_j == sink) ||
      (node_i == sink && node_j == kDepotNode)) {
    return 0.0;
  }
  return inst.distance(node_i, node_j) / fleet.speed;
}

double route_cost(const Instance& inst, const Route& route) {
  if (route.visits.empty()) {
    return 0.0;
  }
  double cost = 0.0;
  int prev_gate = kDepotGate;
  for (int flight_id : route.visits) {
    const int g = inst.flight(flight_id).gate_id;
    cost += inst.gate_distance(prev_gate, g);
    prev_gate = g;
  }
  cost += inst.gate_distance(prev_gate, kDepotGate);
  return cost;
}

double global_cost(const Instance& inst, const GlobalSolution& sol) {
  double cost = 0.0;
  for (const auto& r : sol.routes) {
    cost += route_cost(inst, r);
  }
  return cost;
}

} // namespace agh

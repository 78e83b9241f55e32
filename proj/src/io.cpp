#include "agh/io.h"

#include <fstream>
#include <sstream>

namespace agh::io {

using nlohmann::json;

namespace {

void check_schema(const json& doc, const char* kind) {
  if (!doc.is_object() || !doc.contains("schema_version")) {
    throw InputError(std::string(kind) + " document lacks schema_version");
  }
  if (doc.at("schema_version").get<int>() != kSchemaVersion) {
    throw InputError(std::string(kind) + " document has unsupported schema_version");
  }
}

} // namespace

json to_json(const Flight& f) {
  json demand = json::array();
  for (const auto& [op, units] : f.demand) {
    demand.push_back({op, units});
  }
  return {{"flight_id", f.flight_id},
          {"gate_id", f.gate_id},
          {"flight_type", f.flight_type},
          {"arrival", f.arrival},
          {"departure", f.departure},
          {"demand", demand}};
}

Flight flight_from_json(const json& f) {
  Flight flight;
  flight.flight_id = f.at("flight_id").get<int>();
  flight.gate_id = f.at("gate_id").get<int>();
  flight.flight_type = f.at("flight_type").get<int>();
  flight.arrival = f.at("arrival").get<double>();
  flight.departure = f.at("departure").get<double>();
  for (const auto& d : f.at("demand")) {
    flight.demand[d.at(0).get<int>()] = d.at(1).get<int>();
  }
  return flight;
}

json stream_to_json(const std::vector<Flight>& flights) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  json list = json::array();
  for (const auto& f : flights) {
    list.push_back(to_json(f));
  }
  doc["flights"] = list;
  return doc;
}

std::vector<Flight> stream_from_json(const json& doc) {
  check_schema(doc, "stream");
  try {
    std::vector<Flight> out;
    for (const auto& f : doc.at("flights")) {
      out.push_back(flight_from_json(f));
    }
    return out;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed stream document: ") + e.what());
  }
}

json to_json(const Instance& inst) {
  json doc;
  doc["schema_version"] = kSchemaVersion;

  json gates = json::array();
  for (const auto& p : inst.gate_positions()) {
    gates.push_back({p.x, p.y});
  }
  doc["gate_positions"] = gates;

  json ops = json::array();
  for (const auto& op : inst.operations()) {
    ops.push_back({{"op_id", op.op_id},
                   {"name", op.name},
                   {"level", op.level},
                   {"duration_by_type", op.duration_by_type}});
  }
  doc["operations"] = ops;

  json fleets = json::array();
  for (const auto& [id, f] : inst.fleets()) {
    fleets.push_back({{"op_id", f.op_id},
                      {"capacity", f.capacity},
                      {"speed", f.speed},
                      {"max_vehicles", f.max_vehicles}});
  }
  doc["fleets"] = fleets;

  json flights = json::array();
  for (const auto& f : inst.flights()) {
    flights.push_back(to_json(f));
  }
  doc["flights"] = flights;
  return doc;
}

Instance instance_from_json(const json& doc) {
  check_schema(doc, "instance");
  try {
    std::vector<Point> gates;
    for (const auto& g : doc.at("gate_positions")) {
      gates.push_back({g.at(0).get<double>(), g.at(1).get<double>()});
    }
    std::vector<OperationSpec> ops;
    for (const auto& o : doc.at("operations")) {
      OperationSpec op;
      op.op_id = o.at("op_id").get<int>();
      op.name = o.value("name", std::string{});
      op.level = o.at("level").get<int>();
      op.duration_by_type = o.at("duration_by_type").get<std::array<double, kFlightTypes>>();
      ops.push_back(std::move(op));
    }
    std::map<int, Fleet> fleets;
    for (const auto& f : doc.at("fleets")) {
      Fleet fleet;
      fleet.op_id = f.at("op_id").get<int>();
      fleet.capacity = f.at("capacity").get<int>();
      fleet.speed = f.at("speed").get<double>();
      fleet.max_vehicles = f.at("max_vehicles").get<int>();
      fleets[fleet.op_id] = fleet;
    }
    std::vector<Flight> flights;
    for (const auto& f : doc.at("flights")) {
      flights.push_back(flight_from_json(f));
    }
    return Instance(std::move(flights), std::move(ops), std::move(fleets), std::move(gates));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed instance document: ") + e.what());
  }
}

json to_json(const GlobalSolution& sol) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["objective"] = sol.objective;
  json routes = json::array();
  for (const auto& r : sol.routes) {
    routes.push_back({{"op_id", r.op_id}, {"visits", r.visits}, {"start_times", r.start_times}});
  }
  doc["routes"] = routes;
  return doc;
}

GlobalSolution solution_from_json(const json& doc) {
  check_schema(doc, "solution");
  try {
    GlobalSolution sol;
    sol.objective = doc.at("objective").get<double>();
    for (const auto& r : doc.at("routes")) {
      Route route;
      route.op_id = r.at("op_id").get<int>();
      route.visits = r.at("visits").get<std::vector<int>>();
      route.start_times = r.at("start_times").get<std::vector<double>>();
      sol.routes.push_back(std::move(route));
    }
    return sol;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed solution document: ") + e.what());
  }
}

std::string dump(const json& doc) {
  return doc.dump(1) + "\n";
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot write " + path.string());
  }
  out << text;
}

json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

Instance read_instance(const std::filesystem::path& path) {
  return instance_from_json(read_json(path));
}

GlobalSolution read_solution(const std::filesystem::path& path) {
  return solution_from_json(read_json(path));
}

} // namespace agh::io

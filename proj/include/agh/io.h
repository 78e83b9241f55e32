#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "agh/model.h"

namespace agh::io {

// Instance and solution documents. Both carry a top-level "schema_version"
// and use minutes as numbers and ids as integers.
nlohmann::json to_json(const Instance& inst);
nlohmann::json to_json(const GlobalSolution& sol);
Instance instance_from_json(const nlohmann::json& doc);
GlobalSolution solution_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const Flight& f);
Flight flight_from_json(const nlohmann::json& f);

// Flights revealed during a real-time simulation.
nlohmann::json stream_to_json(const std::vector<Flight>& flights);
std::vector<Flight> stream_from_json(const nlohmann::json& doc);

std::string dump(const nlohmann::json& doc);

Instance read_instance(const std::filesystem::path& path);
GlobalSolution read_solution(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

} // namespace agh::io

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace agh {

// Key-value configuration in INI layout ("[section]" headers, "key = value"
// lines, ';' or '#' comments).
using Config = boost::property_tree::ptree;

Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& text);

// Comma separated list of numbers, e.g. "5, 7, 6".
std::vector<double> parse_number_list(const std::string& text);

} // namespace agh

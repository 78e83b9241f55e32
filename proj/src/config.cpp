#include "agh/config.h"

#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>

#include "agh/model.h"

namespace agh {

namespace {

// ptree's INI reader only knows ';' comments.
std::string strip_hash_comments(std::istream& in) {
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    out << line << '\n';
  }
  return out.str();
}

} // namespace

Config parse_config(const std::string& text) {
  std::istringstream raw(text);
  std::istringstream cleaned(strip_hash_comments(raw));
  Config cfg;
  try {
    boost::property_tree::ini_parser::read_ini(cleaned, cfg);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open config " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(","));
  std::vector<double> values;
  for (auto& p : parts) {
    boost::trim(p);
    if (p.empty()) {
      continue;
    }
    try {
      std::size_t used = 0;
      values.push_back(std::stod(p, &used));
      if (used != p.size()) {
        throw std::invalid_argument(p);
      }
    } catch (const std::exception&) {
      throw InputError("not a number: '" + p + "'");
    }
  }
  return values;
}

} // namespace agh

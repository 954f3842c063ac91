#include "config.hpp"

#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace spdelab::cli {

namespace {

const std::vector<std::pair<std::string, std::string>>& defaults() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"run.symbols", "heat, frac:1"},
      {"run.dim", "1"},
      {"run.seed", "1"},

      {"symbol.t_samples", "0, 0.5, 1"},
      {"symbol.r_min", "1e-3"},
      {"symbol.r_max", "1e3"},
      {"symbol.radii", "13"},
      {"symbol.directions", "9"},
      {"symbol.dyadic_r_min", "1e-2"},
      {"symbol.dyadic_r_max", "1e2"},
      {"symbol.dyadic_points", "9"},

      {"kernel.L", "16"},
      {"kernel.n", "1024"},
      {"kernel.s", "0"},
      {"kernel.t", "0.25"},
      {"kernel.scaling_t", "0.5"},
      {"kernel.lemmas", "mc1, mc2, mc3, freq"},

      {"hormander.L", "16"},
      {"hormander.n", "4096"},
      {"hormander.T", "2"},
      {"hormander.scales", "8"},
      {"hormander.pairs", "4"},
      {"hormander.rho_min", "0"},
      {"hormander.t_late", "0"},
      {"hormander.C0", "auto"},

      {"lpaley.L", "3.141592653589793"},
      {"lpaley.n", "32"},
      {"lpaley.n_t", "4"},
      {"lpaley.T", "1"},
      {"lpaley.p", "2, 4"},
      {"lpaley.modes", "2"},

      {"spde.L", "8"},
      {"spde.n", "32"},
      {"spde.n_t", "32"},
      {"spde.T", "1"},
      {"spde.paths", "256"},
      {"spde.modes", "4"},
      {"spde.p", "2, 4"},
      {"spde.members", "10"},
      {"spde.isometry_members", "5"},
      {"spde.t_eval", "1"},
      {"spde.input", "battery"},
      {"spde.any_p", "false"},
      {"spde.dump_paths", "0"},

      {"bernstein.phis", "1:0.25:0.75"},
      {"bernstein.L", "16"},
      {"bernstein.n", "1024"},
      {"bernstein.kernel_n", "2048"},
  };
  return table;
}

std::string canonical(const std::string& raw) { return boost::algorithm::trim_copy(raw); }

}  // namespace

RunConfig::RunConfig() {
  for (const auto& [k, v] : defaults()) values_[k] = v;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!values_.count(key)) throw ConfigError("unknown config key '" + key + "'");
  values_[key] = canonical(value);
}

void RunConfig::merge_ini(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      if (section == "command") {
        command = canonical(body.data());
        continue;
      }
      throw ConfigError("config entry '" + section + "' must live in a section");
    }
    for (const auto& [key, leaf] : body) set(section + "." + key, leaf.data());
  }
}

void RunConfig::merge_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open manifest '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(is);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("config")) throw ConfigError("manifest lacks a config object");
  if (doc.contains("command")) command = doc["command"].get<std::string>();
  for (const auto& [section, body] : doc["config"].items()) {
    if (!body.is_object()) throw ConfigError("manifest section '" + section + "' is not an object");
    for (const auto& [key, value] : body.items()) {
      if (!value.is_string()) throw ConfigError("manifest value " + section + "." + key + " must be a string");
      set(section + "." + key, value.get<std::string>());
    }
  }
}

std::string RunConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

double RunConfig::number(const std::string& key) const {
  const std::string v = text(key);
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (...) {
  }
  throw ConfigError("config key '" + key + "' expects a number, got '" + v + "'");
}

int RunConfig::integer(const std::string& key) const {
  const double x = number(key);
  if (x != static_cast<int>(x)) throw ConfigError("config key '" + key + "' expects an integer");
  return static_cast<int>(x);
}

std::uint64_t RunConfig::seed() const {
  const std::string v = text("run.seed");
  try {
    std::size_t used = 0;
    const auto s = std::stoull(v, &used);
    if (used == v.size()) return s;
  } catch (...) {
  }
  throw ConfigError("run.seed expects a non-negative integer, got '" + v + "'");
}

bool RunConfig::flag(const std::string& key) const {
  const std::string v = boost::algorithm::to_lower_copy(text(key));
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "' expects true or false");
}

std::vector<std::string> RunConfig::list(const std::string& key) const {
  std::vector<std::string> parts;
  const std::string v = text(key);
  boost::algorithm::split(parts, v, boost::algorithm::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::algorithm::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : list(key)) {
    try {
      std::size_t used = 0;
      const double x = std::stod(item, &used);
      if (used != item.size()) throw ConfigError("");
      out.push_back(x);
    } catch (...) {
      throw ConfigError("config key '" + key + "' expects a list of numbers");
    }
  }
  return out;
}

void RunConfig::refine() {
  auto twice = [&](const std::string& key) { values_[key] = std::to_string(2 * integer(key)); };
  for (const char* key : {"kernel.n", "hormander.n", "lpaley.n", "lpaley.n_t", "spde.n", "spde.n_t", "spde.paths",
                          "bernstein.n", "bernstein.kernel_n"})
    twice(key);
}

Json RunConfig::manifest() const {
  Json config = Json::object();
  for (const auto& [key, value] : values_) {
    const auto dot = key.find('.');
    config[key.substr(0, dot)][key.substr(dot + 1)] = value;
  }
  return Json{{"command", command}, {"config", config}};
}

}  // namespace spdelab::cli

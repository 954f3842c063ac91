#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace spdelab {

using Json = nlohmann::ordered_json;

/// Outcome of one numerical certificate: named quantities, tolerances used,
/// free-form flags and the pass/fail verdict.
struct CheckReport {
  std::string name;
  bool passed = false;
  Json values = Json::object();
  std::vector<std::string> notes;

  double value(const std::string& key) const { return values.at(key).get<double>(); }
  void set(const std::string& key, double v) { values[key] = v; }
  void note(std::string text) { notes.push_back(std::move(text)); }

  Json to_json() const;
};

/// Fits y = a + b x by least squares and returns b.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace spdelab

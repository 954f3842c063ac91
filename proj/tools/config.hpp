#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "spdelab/report.hpp"

namespace spdelab::cli {

/// Raised for malformed or unknown configuration entries.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat section.key -> text settings with one nesting level. Every key has a
/// default; files may only override known keys.
class RunConfig {
 public:
  RunConfig();

  /// INI text ("[section]" headers, "key = value" lines).
  void merge_ini(const std::string& path);
  /// A manifest written by a previous run; also restores the command.
  void merge_manifest(const std::string& path);
  void set(const std::string& key, const std::string& value);

  std::string text(const std::string& key) const;
  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  std::uint64_t seed() const;
  bool flag(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::string> list(const std::string& key) const;

  /// Doubles grid sizes, time steps and path counts.
  void refine();

  std::string command;

  /// {"command": ..., "config": {section: {key: value}}}.
  Json manifest() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace spdelab::cli

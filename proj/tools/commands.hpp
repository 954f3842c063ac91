#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "config.hpp"
#include "spdelab/lpaley.hpp"
#include "spdelab/report.hpp"

namespace spdelab::cli {

using Cell = std::variant<double, long long, std::string, bool>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

struct Outcome {
  std::vector<CheckReport> reports;
  /// File stem (under tables/) -> table.
  std::map<std::string, Table> tables;
  /// File stem -> simulated paths for the binary dump.
  std::map<std::string, std::vector<ScalarField>> path_dumps;
  /// File name -> Markdown text.
  std::map<std::string, std::string> documents;
  bool passed() const;
};

const std::vector<std::string>& command_names();

/// Runs one command; throws spdelab::Error or ConfigError on invalid input.
Outcome run_command(const std::string& command, const RunConfig& config);

/// CSV text with every floating-point value printed as %.17g.
std::string to_csv(const Table& table);

/// GitHub-style Markdown table; cells as in to_csv.
std::string to_markdown(const Table& table);

}  // namespace spdelab::cli

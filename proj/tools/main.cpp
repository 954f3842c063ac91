#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "spdelab/parallel.hpp"
#include "spdelab/spde.hpp"

namespace fs = std::filesystem;
using namespace spdelab;

namespace {

int fail(const std::string& type, const std::string& message) {
  Json err{{"error", {{"type", type}, {"message", message}}}};
  std::cout << err.dump() << std::endl;
  return 2;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical certificates for parabolic equations with pseudo-differential operators"};
  std::string command, config_path, out_dir = "spdelab-out";
  std::optional<std::uint64_t> seed;
  bool refine = false, json = false;
  int threads = 0;
  std::string commands_help = "one of:";
  for (const auto& c : cli::command_names()) commands_help += " " + c;
  app.add_option("command", command, commands_help);
  app.add_option("--config", config_path, "INI config, or a manifest.json from an earlier run");
  app.add_option("--seed", seed, "Random seed (overrides run.seed)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_flag("--refine", refine, "Double grid sizes and path counts");
  app.add_flag("--json", json, "Print the report document to stdout");
  app.add_option("--threads", threads, "Worker threads (0: hardware concurrency)")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  cli::RunConfig config;
  try {
    if (!config_path.empty()) {
      if (fs::path(config_path).extension() == ".json")
        config.merge_manifest(config_path);
      else
        config.merge_ini(config_path);
    }
    if (!command.empty()) config.command = command;
    if (config.command.empty()) return fail("usage", "no command given");
    if (seed) config.set("run.seed", std::to_string(*seed));
    if (refine) config.refine();
  } catch (const cli::ConfigError& e) {
    return fail("config", e.what());
  }

  if (threads > 0) set_worker_count(threads);

  cli::Outcome outcome;
  try {
    outcome = cli::run_command(config.command, config);
  } catch (const cli::ConfigError& e) {
    return fail("config", e.what());
  } catch (const Error& e) {
    return fail("invalid_input", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }

  Json doc{{"command", config.command}, {"passed", outcome.passed()}, {"reports", Json::array()}};
  for (const auto& r : outcome.reports) doc["reports"].push_back(r.to_json());

  try {
    const fs::path out(out_dir);
    fs::create_directories(out / "tables");
    write_text(out / "report.json", doc.dump(2) + "\n");
    write_text(out / "manifest.json", config.manifest().dump(2) + "\n");
    for (const auto& [name, table] : outcome.tables) write_text(out / "tables" / (name + ".csv"), cli::to_csv(table));
    for (const auto& [name, text] : outcome.documents) write_text(out / name, text);
    if (!outcome.path_dumps.empty()) {
      fs::create_directories(out / "paths");
      for (const auto& [name, paths] : outcome.path_dumps) write_path_dump((out / "paths" / (name + ".bin")).string(), paths);
    }
  } catch (const std::exception& e) {
    return fail("io", e.what());
  }

  if (json) std::cout << doc.dump(2) << std::endl;
  return outcome.passed() ? 0 : 1;
}

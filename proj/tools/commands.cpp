#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "spdelab/bernstein.hpp"
#include "spdelab/kernels.hpp"
#include "spdelab/metric.hpp"
#include "spdelab/spde.hpp"
#include "spdelab/symbols.hpp"

namespace spdelab::cli {

bool Outcome::passed() const {
  for (const auto& r : reports)
    if (!r.passed) return false;
  return true;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"symbol-check", "kernel-table", "hormander", "lpaley",
                                                 "spde",         "bernstein",    "all"};
  return names;
}

namespace {

std::string cell_text(const Cell& cell) {
  if (const double* d = std::get_if<double>(&cell)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  if (const long long* n = std::get_if<long long>(&cell)) return std::to_string(*n);
  if (const bool* b = std::get_if<bool>(&cell)) return *b ? "true" : "false";
  return std::get<std::string>(cell);
}

std::string csv_quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::string to_csv(const Table& table) {
  std::ostringstream os;
  for (std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << csv_quoted(table.header[i]);
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_quoted(cell_text(row[i]));
    os << '\n';
  }
  return os.str();
}

std::string to_markdown(const Table& table) {
  std::ostringstream os;
  os << '|';
  for (const auto& h : table.header) os << ' ' << h << " |";
  os << "\n|";
  for (std::size_t i = 0; i < table.header.size(); ++i) os << " --- |";
  os << '\n';
  for (const auto& row : table.rows) {
    os << '|';
    for (const auto& c : row) os << ' ' << cell_text(c) << " |";
    os << '\n';
  }
  return os.str();
}

namespace {

std::string stem(const std::string& id) {
  std::string s = id;
  for (char& c : s)
    if (c == ':' || c == '/' || c == ' ') c = '_';
  return s;
}

void tag(CheckReport& rep, const std::string& subject) {
  if (rep.name.size() >= subject.size() && rep.name.compare(rep.name.size() - subject.size(), subject.size(), subject) == 0)
    return;
  rep.name += ":" + subject;
}

void absorb(Outcome& into, Outcome&& from) {
  for (auto& r : from.reports) into.reports.push_back(std::move(r));
  for (auto& [k, v] : from.tables) into.tables[k] = std::move(v);
  for (auto& [k, v] : from.path_dumps) into.path_dumps[k] = std::move(v);
  for (auto& [k, v] : from.documents) into.documents[k] = std::move(v);
}

bool is_subordinate(const std::string& id) { return id.rfind("subord:", 0) == 0; }

QuasiMetric metric_for(const std::string& id) {
  if (is_subordinate(id)) return subordinate_metric(bernstein_from_id(id.substr(7)));
  if (id == "heat" || id.rfind("order2", 0) == 0) return parabolic_metric(2.0);
  std::vector<std::string> parts;
  std::stringstream ss(id);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if ((parts[0] == "frac" || parts[0] == "nonlocal") && parts.size() >= 2) return parabolic_metric(std::stod(parts[1]));
  throw Error("no quasi-metric is defined for symbol '" + id + "'");
}

// ---------------------------------------------------------------------------

Outcome symbol_check(const RunConfig& cfg) {
  Outcome out;
  const int d = cfg.integer("run.dim");
  const auto ts = cfg.numbers("symbol.t_samples");
  const auto xi = frequency_sample_grid(d, cfg.number("symbol.r_min"), cfg.number("symbol.r_max"),
                                        cfg.integer("symbol.radii"), cfg.integer("symbol.directions"));
  const auto Rs = log_grid(cfg.number("symbol.dyadic_r_min"), cfg.number("symbol.dyadic_r_max"),
                           cfg.integer("symbol.dyadic_points"));
  Table table{{"symbol", "check", "passed"}, {}};
  for (const auto& id : cfg.list("run.symbols")) {
    const Symbol sym = symbol_from_id(id, d);
    std::vector<int> alpha(d, 0);
    alpha[0] = 1;
    std::vector<CheckReport> reps = {check_ellipticity(sym, ts, xi), check_derivative_bounds(sym, ts, xi, sym.d0()),
                                     check_dyadic_condition(sym, Rs, {DyadicCombo{{alpha, 1}}}, ts)};
    for (auto& r : reps) {
      tag(r, id);
      table.rows.push_back({id, r.name, r.passed});
      out.reports.push_back(std::move(r));
    }
  }
  out.tables["symbol_check"] = std::move(table);
  return out;
}

Outcome kernel_table(const RunConfig& cfg) {
  Outcome out;
  const int d = cfg.integer("run.dim");
  const SpaceTimeGrid grid(cfg.number("kernel.L"), cfg.integer("kernel.n"), d);
  const double s = cfg.number("kernel.s"), t = cfg.number("kernel.t");
  for (const auto& id : cfg.list("run.symbols")) {
    const Symbol sym = symbol_from_id(id, d);
    const KernelField kf = kernel_field(sym, s, t, grid);
    Table dump;
    for (int a = 0; a < d; ++a) dump.header.push_back("x" + std::to_string(a + 1));
    dump.header.push_back("p");
    for (std::size_t q = 0; q < grid.points(); ++q) {
      std::vector<Cell> row;
      for (double c : grid.coordinate(q)) row.push_back(c);
      row.push_back(kf.values[q].real());
      dump.rows.push_back(std::move(row));
    }
    out.tables["kernel_" + stem(id)] = std::move(dump);

    if (is_subordinate(id)) {
      const auto phi = bernstein_from_id(id.substr(7));
      for (const auto& [which, base] : {std::pair{"615_1", "mc1"}, {"615_2", "mc2"}, {"615_3", "mc3"}}) {
        auto rep = verify_subordinate_lemma(phi, grid, which, default_lemma_sweep(base, grid));
        tag(rep, id);
        out.reports.push_back(std::move(rep));
      }
      continue;
    }
    auto scaling = check_scaling_relations(sym, s, cfg.number("kernel.scaling_t"), grid, 50, cfg.seed());
    tag(scaling, id);
    out.reports.push_back(std::move(scaling));
    Table lemmas{{"lemma", "slope", "passed"}, {}};
    for (const auto& lemma : cfg.list("kernel.lemmas")) {
      auto rep = verify_kernel_lemma(sym, grid, lemma, default_lemma_sweep(lemma, grid));
      tag(rep, id);
      lemmas.rows.push_back({lemma, rep.values.contains("slope") ? rep.value("slope") : NAN, rep.passed});
      out.reports.push_back(std::move(rep));
    }
    out.tables["lemmas_" + stem(id)] = std::move(lemmas);
  }
  return out;
}

Outcome hormander(const RunConfig& cfg) {
  Outcome out;
  const int d = cfg.integer("run.dim");
  const SpaceTimeGrid grid(cfg.number("hormander.L"), cfg.integer("hormander.n"), d);
  PairSampler sampler;
  sampler.scales = cfg.integer("hormander.scales");
  sampler.pairs_per_scale = cfg.integer("hormander.pairs");
  sampler.rho_min = cfg.number("hormander.rho_min");
  sampler.t_late = cfg.number("hormander.t_late");
  sampler.seed = cfg.seed();
  for (const auto& id : cfg.list("run.symbols")) {
    const Symbol sym = symbol_from_id(id, d);
    QuasiMetric rho = metric_for(id);
    if (cfg.text("hormander.C0") != "auto") rho.override_hormander_constant(cfg.number("hormander.C0"));
    auto rep = hormander_sup_estimate(sym, rho, sampler, cfg.number("hormander.T"), grid);
    Table table{{"scale", "rho", "t", "s", "offset", "value", "value_refined"}, {}};
    for (const auto& p : rep.values["pairs"])
      table.rows.push_back({static_cast<long long>(p["scale"].get<int>()), p["rho"].get<double>(),
                            p["t"].get<double>(), p["s"].get<double>(), p["offset"].get<double>(),
                            p["value"].get<double>(), p["value_refined"].get<double>()});
    rep.values.erase("pairs");
    tag(rep, id);
    out.reports.push_back(std::move(rep));
    out.tables["hormander_" + stem(id)] = std::move(table);
  }
  return out;
}

Outcome lpaley(const RunConfig& cfg) {
  Outcome out;
  const int d = cfg.integer("run.dim");
  const SpaceTimeGrid grid(cfg.number("lpaley.L"), cfg.integer("lpaley.n"), d, cfg.number("lpaley.T"),
                           cfg.integer("lpaley.n_t"));
  for (const auto& id : cfg.list("run.symbols")) {
    const Symbol sym = symbol_from_id(id, d);
    auto rep = verify_lpaley(sym, lpaley_battery(sym, cfg.integer("lpaley.modes"), cfg.seed()),
                             cfg.numbers("lpaley.p"), grid);
    Table table{{"p", "field_id", "refined", "f_norm", "g_norm", "ratio"}, {}};
    for (const auto& r : rep.values["rows"])
      table.rows.push_back({r["p"].get<double>(), r["field_id"].get<std::string>(), r["refined"].get<bool>(),
                            r["f_norm"].get<double>(), r["g_norm"].get<double>(), r["ratio"].get<double>()});
    rep.values.erase("rows");
    tag(rep, id);
    out.reports.push_back(std::move(rep));
    out.tables["lpaley_" + stem(id)] = std::move(table);
  }
  return out;
}

Outcome spde(const RunConfig& cfg) {
  Outcome out;
  const int d = cfg.integer("run.dim");
  const SpaceTimeGrid grid(cfg.number("spde.L"), cfg.integer("spde.n"), d, cfg.number("spde.T"),
                           cfg.integer("spde.n_t"));
  const int modes = cfg.integer("spde.modes");
  const NoiseEnsemble noise(cfg.seed(), static_cast<std::size_t>(cfg.integer("spde.paths")), modes, grid.steps(),
                            grid.horizon());
  std::vector<AdaptedProcess> battery;
  const std::string input = cfg.text("spde.input");
  if (input == "battery") {
    battery = spde_battery(grid, modes, cfg.seed(), cfg.integer("spde.members"));
  } else if (input == "zero") {
    battery.push_back({"zero", {0.0, grid.horizon()}, modes, [](int, int, Point) { return 0.0; }});
  } else {
    throw ConfigError("spde.input must be 'battery' or 'zero'");
  }
  RatioOptions options;
  options.allow_any_p = cfg.flag("spde.any_p");
  const int iso = std::min<int>(cfg.integer("spde.isometry_members"), static_cast<int>(battery.size()));
  const int dumps = cfg.integer("spde.dump_paths");
  for (const auto& id : cfg.list("run.symbols")) {
    const Symbol sym = symbol_from_id(id, d);
    for (int b = 0; b < iso; ++b) {
      auto rep = ito_isometry_check(sym, battery[b], noise, grid, cfg.number("spde.t_eval"));
      tag(rep, id);
      out.reports.push_back(std::move(rep));
    }
    Table table{{"p", "id", "status", "ratio", "se", "ratio_refined"}, {}};
    for (double p : cfg.numbers("spde.p")) {
      auto rep = lp_ratio_estimate(sym, battery, noise, grid, p, options);
      for (const auto& m : rep.values["members"]) {
        if (m["status"] != "estimated") {
          table.rows.push_back({p, m["id"].get<std::string>(), m["status"].get<std::string>(), NAN, NAN, NAN});
          continue;
        }
        table.rows.push_back({p, m["id"].get<std::string>(), std::string("estimated"), m["ratio"].get<double>(),
                              m["se"].get<double>(),
                              m.contains("ratio_refined") ? m["ratio_refined"].get<double>() : NAN});
      }
      tag(rep, id);
      out.reports.push_back(std::move(rep));
    }
    out.tables["spde_" + stem(id)] = std::move(table);
    if (dumps > 0) {
      std::vector<ScalarField> paths;
      const auto post = half_power_multiplier(sym, grid);
      for (int i = 0; i < std::min<int>(dumps, static_cast<int>(noise.paths())); ++i)
        paths.push_back(stochastic_convolution(sym, battery.front(), noise, grid, post, i));
      out.path_dumps["paths_" + stem(id)] = std::move(paths);
    }
  }
  return out;
}

Table bernstein_catalog_table() {
  struct Entry {
    int id;
    const char* name;
    const char* formula;
    const char* range;
    const char* lower;
    const char* upper;
  };
  static const Entry entries[] = {
      {1, "alpha-beta", "l^a + l^b", "0 < a < b < 1", "a", "b"},
      {2, "nested", "(l + l^a)^b", "a, b in (0, 1)", "a b", "b"},
      {3, "log-up", "l^a log(1 + l)^b", "a in (0, 1), 0 < b < 1 - a", "a", "a + b"},
      {4, "log-down", "l^a log(1 + l)^(-b)", "a in (0, 1), 0 < b < a", "a - b", "a"},
      {5, "log-cosh", "log(cosh sqrt(l))^a", "a in (0, 1)", "a / 2", "a"},
      {6, "log-sinh", "(log(sinh sqrt(l)) - log(sqrt(l)))^a", "a in (0, 1)", "a / 2", "a"},
  };
  Table table{{"id", "name", "formula", "parameters", "lower_exponent", "upper_exponent"}, {}};
  table.rows.push_back({std::string("power"), std::string("power"), std::string("l^a"), std::string("a in (0, 1]"),
                        std::string("a"), std::string("a")});
  for (const auto& e : entries)
    table.rows.push_back({static_cast<long long>(e.id), std::string(e.name), std::string(e.formula),
                          std::string(e.range), std::string(e.lower), std::string(e.upper)});
  return table;
}

Outcome bernstein(const RunConfig& cfg) {
  Outcome out;
  out.tables["bernstein_catalog"] = bernstein_catalog_table();
  out.documents["bernstein_catalog.md"] = "# Bernstein catalog\n\n" + to_markdown(out.tables["bernstein_catalog"]);
  const int d = cfg.integer("run.dim");
  const SpaceTimeGrid grid(cfg.number("bernstein.L"), cfg.integer("bernstein.n"), d);
  for (const auto& phi_id : cfg.list("bernstein.phis")) {
    const auto phi = bernstein_from_id(phi_id);
    std::vector<CheckReport> reps;
    reps.push_back(bernstein_invariants(phi));
    reps.push_back(scaling_check(phi, log_grid(1e-8, 1e8, 161)));
    reps.push_back(h_conditions_check(phi, log_grid(1e-6, 1e6, 49), log_grid(1e-6, 1e6, 49)));

    CheckReport inverse;
    inverse.name = "generalized-inverse";
    double worst = 0.0;
    Table table{{"lambda", "phi", "inverse_of_phi"}, {}};
    for (double s : log_grid(1e-6, 1e6, 61)) {
      const double v = phi(s);
      const double back = generalized_inverse(phi, v);
      worst = std::max(worst, std::abs(back / s - 1.0));
      table.rows.push_back({s, v, back});
    }
    inverse.set("max_round_trip_error", worst);
    inverse.set("tolerance", 1e-9);
    inverse.passed = worst <= 1e-9;
    reps.push_back(std::move(inverse));

    for (const auto& [which, base] : {std::pair{"615_1", "mc1"}, {"615_2", "mc2"}, {"615_3", "mc3"}})
      reps.push_back(verify_subordinate_lemma(phi, grid, which, default_lemma_sweep(base, grid)));
    for (const char* which : {"as_ker", "as_ker2", "as_ker3"})
      reps.push_back(verify_bernstein_kernel_bounds(phi, d, which, cfg.integer("bernstein.kernel_n")));
    for (auto& r : reps) {
      tag(r, phi_id);
      out.reports.push_back(std::move(r));
    }
    out.tables["bernstein_" + stem(phi_id)] = std::move(table);
  }
  return out;
}

}  // namespace

Outcome run_command(const std::string& command, const RunConfig& config) {
  if (command == "symbol-check") return symbol_check(config);
  if (command == "kernel-table") return kernel_table(config);
  if (command == "hormander") return hormander(config);
  if (command == "lpaley") return lpaley(config);
  if (command == "spde") return spde(config);
  if (command == "bernstein") return bernstein(config);
  if (command == "all") {
    Outcome out;
    for (const auto& name : command_names())
      if (name != "all") absorb(out, run_command(name, config));
    return out;
  }
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace spdelab::cli

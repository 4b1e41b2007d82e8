#include "optpart/config.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <map>
#include <numbers>

#include "optpart/errors.hpp"
#include "optpart/init.hpp"
#include "optpart/io.hpp"

namespace optpart {

namespace {

double parse_factor(std::string t) {
  const auto first = t.find_first_not_of(" \t");
  const auto last = t.find_last_not_of(" \t");
  if (first == std::string::npos) throw ConfigError("empty number");
  t = t.substr(first, last - first + 1);
  double scale = 1.0;
  if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
    scale = std::numbers::pi;
    t.resize(t.size() - 2);
    if (!t.empty() && t.back() == '*') t.pop_back();
    if (t.empty()) return scale;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != t.size()) throw ConfigError("'" + t + "' is not a number");
  return v * scale;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

}  // namespace

double parse_real(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return parse_factor(text);
    return parse_factor(text.substr(0, slash)) / parse_factor(text.substr(slash + 1));
  } catch (const ConfigError& e) {
    throw ConfigError("invalid number '" + text + "': " + e.what());
  }
}

TauSchedule parse_tau_schedule(const std::string& text) {
  std::vector<double> steps;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    steps.push_back(parse_real(text.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  const double steady = steps.back();
  steps.pop_back();
  try {
    return TauSchedule(std::move(steps), steady);
  } catch (const std::invalid_argument&) {
    throw ConfigError("time steps in '" + text + "' must be positive");
  }
}

RunSpec parse_config(const std::vector<std::string>& args) {
  RunSpec spec;
  CLI::App app{"Optimal k-partition solver (constrained gradient flow)", "optpart"};
  app.set_config("--config", "", "Flat `key = value` file; flags override it");
  app.allow_config_extras(false);

  std::string tau_text;
  std::vector<std::string> schedule_items;
  std::string algorithm = "four-step";
  std::string bc = "periodic";
  bool carry_secant = false;
  bool no_stop = false;

  app.add_option("--k", spec.k, "Number of parts")->check(CLI::Range(1, 1 << 20));
  app.add_option("--tau", tau_text, "Constant time step, e.g. 0.1 or pi/16 (default 0.1)");
  app.add_option("--tau-schedule", schedule_items,
                 "Warm-up steps then the steady step, e.g. 1/128,1/64,1/32,1/16,1/8")
      ->delimiter(',');
  app.add_option("--grid", spec.grid_n, "Nodes per axis (even, >= 4)")->capture_default_str();
  app.add_option("--dim", spec.dim, "Spatial dimension")->check(CLI::IsMember({2, 3}))->capture_default_str();
  app.add_option("--algorithm", algorithm, "Time-stepping scheme")
      ->check(CLI::IsMember({"four-step", "three-step-1", "three-step-2", "three-step-1-ed",
                             "three-step-2-ed"}))
      ->capture_default_str();
  auto* bc_opt = app.add_option("--bc", bc, "Boundary condition of the box")
                     ->check(CLI::IsMember({"periodic", "dirichlet"}))
                     ->capture_default_str();
  app.add_option("--mask", spec.mask_source, "PGM file or shape:name[:params]");
  app.add_option("--seed", spec.seed, "Seed for the Voronoi initialization")->capture_default_str();
  app.add_option("--max-iters", spec.scheme.n_max, "Iteration cap")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--out-dir", spec.out_dir, "Output directory")->capture_default_str();
  app.add_option("--snapshot-every", spec.snapshot_every, "Write labels every N iterations (0: off)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--tile", spec.tile_reps, "Also export the label map tiled N times per axis")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--dump-fields", spec.dump_fields, "Write the final raw fields");
  app.add_flag("--carry-secant", carry_secant, "Seed each secant solve with the previous pair");
  app.add_flag("--no-stop", no_stop, "Ignore the fixed-label stopping test");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  if (!tau_text.empty() && !schedule_items.empty())
    throw ConfigError("--tau and --tau-schedule are mutually exclusive");

  SchemeConfig& sc = spec.scheme;
  sc.variant = *parse_variant(algorithm);
  sc.bc = bc == "dirichlet" ? Boundary::dirichlet : Boundary::periodic;
  sc.secant.reset_per_step = !carry_secant;
  sc.stop_on_fixed_labels = !no_stop;
  if (spec.k < 2) throw ConfigError("--k must be at least 2");

  std::optional<GridSpec> grid;
  try {
    grid.emplace(spec.dim, spec.grid_n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--grid: ") + e.what());
  }

  if (!spec.mask_source.empty()) {
    if (bc_opt->count() > 0 && sc.bc == Boundary::periodic)
      throw ConfigError("masks require --bc dirichlet (got --bc periodic)");
    sc.bc = Boundary::dirichlet;
    if (spec.mask_source.rfind("shape:", 0) == 0)
      sc.mask.emplace(make_mask(*grid, spec.mask_source.substr(6)));
    else
      sc.mask.emplace(read_mask_pgm(spec.mask_source, *grid));
  }

  if (!schedule_items.empty())
    sc.tau = parse_tau_schedule(join(schedule_items));
  else if (!tau_text.empty())
    sc.tau = parse_tau_schedule(tau_text);
  else if (sc.mask)
    sc.tau = TauSchedule::masked_default();
  else
    sc.tau = TauSchedule(0.1);

  if (spec.tile_reps > 0 && sc.bc != Boundary::periodic)
    throw ConfigError("--tile needs a periodic run");
  return spec;
}

}  // namespace optpart

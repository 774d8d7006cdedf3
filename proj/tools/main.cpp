#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli.hpp"

using namespace mcpulse::cli;

int main(int argc, char** argv) {
  CLI::App app{"mcpulse: particle-size mixtures for molecular pulse shaping"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::vector<double> t0_fracs, xi_isi, sizes;
  std::optional<double> single_size, xi_det;
  std::optional<unsigned> nd, workers;
  std::optional<std::uint64_t> particles;

  auto add_options = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "Monte Carlo seed (default 0)");
    sub->add_option("--t0-frac", t0_fracs, "detection duration(s) as fraction of T")
        ->delimiter(',');
    sub->add_option("--xi-isi", xi_isi, "ISI threshold(s)")->delimiter(',');
    sub->add_option("--xi-det", xi_det, "detection threshold");
    sub->add_option("--sizes", sizes, "particle radii [nm]")->delimiter(',');
    sub->add_option("--single-size", single_size, "restrict to one particle radius [nm]");
    sub->add_option("--nd", nd, "detection-value scaling exponent (0, 2 or 3)");
    sub->add_option("--workers", workers, "worker threads (0 = all cores)");
    sub->add_option("--particles", particles, "Monte Carlo particle count (validate)");
  };
  add_options(app.add_subcommand("cir", "sampled CIR and worst-case ISI per size"));
  add_options(app.add_subcommand("optimize", "minimum peak-detection-value mixture"));
  add_options(app.add_subcommand("sweep", "tradeoff over detection durations and ISI thresholds"));
  add_options(app.add_subcommand("validate", "Monte Carlo check of the analytic CIR"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kInvalidConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (out) cfg.out = *out;
    if (seed) cfg.seed = *seed;
    if (!sizes.empty()) cfg.sizes_nm = sizes;
    if (single_size) cfg.single_size_nm = single_size;
    if (nd) cfg.n_d = *nd;
    if (xi_det) cfg.xi_det = *xi_det;
    if (workers) cfg.workers = *workers;
    if (particles) cfg.mc_particles = *particles;
    if (command == "sweep") {
      if (!t0_fracs.empty()) cfg.sweep_t0_fracs = t0_fracs;
      if (!xi_isi.empty()) cfg.sweep_xi_isi = xi_isi;
    } else {
      if (t0_fracs.size() > 1) throw ConfigError("--t0-frac: " + command + " takes one value");
      if (xi_isi.size() > 1) throw ConfigError("--xi-isi: " + command + " takes one value");
      if (!t0_fracs.empty()) cfg.t0_frac = t0_fracs.front();
      if (!xi_isi.empty()) cfg.xi_isi = xi_isi.front();
    }
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoError;
  }
  return run_command(command, cfg, std::cout, std::cerr);
}

#pragma once

// Configuration, subcommands and file output of the mcpulse command line.
// Boundary units: radii in nm, distances in um, times in s.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcpulse/mcvalidate.hpp"
#include "mcpulse/optimizer.hpp"

namespace mcpulse::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,  // e.g. Monte Carlo validation did not pass
  kInfeasible = 2,
  kInvalidConfig = 3,
  kIoError = 4,
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // channel
  double distance_um = 10.0;
  double receiver_radius_um = 1.0;
  double D0 = 8e-12;  // m^2/s
  double R0_nm = 25.0;
  double symbol_duration_s = 120.0;
  // particles
  std::vector<double> sizes_nm{10, 30, 50, 70, 90, 110};
  unsigned n_d = 3;
  std::optional<double> single_size_nm;
  // sampling
  std::size_t samples_per_symbol = 600;
  double isi_rel_tol = kDefaultIsiRelTol;
  // detection (cir / optimize)
  double xi_det = 15.0;
  double xi_isi = 8.0;
  double t0_frac = 0.25;
  std::optional<std::size_t> l0;  // nullopt: search
  bool benchmark = true;
  RoundingMode rounding = RoundingMode::nearest;
  // sweep
  std::vector<double> sweep_t0_fracs;
  std::vector<double> sweep_xi_isi{6, 8, 10};
  // validate
  std::uint64_t mc_particles = 200'000;
  std::size_t mc_horizon = 100;
  std::optional<double> mc_dt_sim;  // default: sample step / 10
  double mc_sigma_mult = 3.0;
  double mc_model_allowance = 0.03;
  double mc_significance = kDefaultSignificance;
  // run
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::string out = "out";

  RunConfig();

  /// Throws ConfigError naming the offending field.
  void validate() const;

  ChannelParams channel() const;
  ParticleSet particles() const;
  /// Radii of particles() in nm, ascending.
  std::vector<double> radii_nm() const;
};

/// Fields not present keep their defaults; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);

/// Reads a JSON file; ConfigError on parse problems, IoError if unreadable.
RunConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64 over the canonical config JSON, excluding `out` and `workers`
/// (neither affects results).
std::string config_hash(const RunConfig& cfg);

/// Shortest-round-trip is not required; 17 significant digits always are.
std::string format_double(double v);

int cmd_cir(const RunConfig& cfg, std::ostream& log);
int cmd_optimize(const RunConfig& cfg, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::ostream& log);
int cmd_validate(const RunConfig& cfg, std::ostream& log);

/// Dispatches by name and maps exceptions to exit codes.
int run_command(const std::string& name, const RunConfig& cfg, std::ostream& log,
                std::ostream& err);

}  // namespace mcpulse::cli

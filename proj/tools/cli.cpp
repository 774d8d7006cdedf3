#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "mcpulse/mcvalidate.hpp"

namespace mcpulse::cli {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string size_label(double nm) {
  std::string s = format_double(nm);
  return s + "nm";
}

// Output file assembled in memory and written in one go.
class CsvFile {
 public:
  CsvFile(const RunConfig& cfg, const std::string& command) {
    body_ << "# mcpulse " << kVersion << "\n";
    body_ << "# command: " << command << "\n";
    body_ << "# config_hash: " << config_hash(cfg) << "\n";
  }

  void comment(const std::string& line) { body_ << "# " << line << "\n"; }

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((body_ << (first ? "" : ",") << cell(cells), first = false), ...);
    body_ << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) body_ << (i ? "," : "") << cells[i];
    body_ << "\n";
  }

  void save(const std::filesystem::path& path) const;

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(bool b) { return b ? "1" : "0"; }
  template <typename I>
    requires std::is_integral_v<I>
  static std::string cell(I v) { return std::to_string(v); }

  std::ostringstream body_;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

void CsvFile::save(const std::filesystem::path& path) const { write_text(path, body_.str()); }

std::filesystem::path out_path(const RunConfig& cfg, const char* name) {
  return std::filesystem::path(cfg.out) / name;
}

// Without `out` and `workers`, so the file is identical wherever and however
// the run executed.
void save_effective_config(const RunConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("out");
  j.erase("workers");
  write_text(out_path(cfg, "effective_config.json"), j.dump(2) + "\n");
}

template <typename T>
void read_field(const json& obj, const char* key, T& dst, const std::string& path) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + "." + key + ": wrong type");
  }
}

template <typename T>
void read_optional(const json& obj, const char* key, std::optional<T>& dst,
                   const std::string& path) {
  if (!obj.contains(key)) return;
  if (obj.at(key).is_null()) {
    dst.reset();
    return;
  }
  T v{};
  read_field(obj, key, v, path);
  dst = v;
}

const json& section(const json& j, const char* key, const std::vector<std::string>& allowed) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  const json& s = j.at(key);
  if (!s.is_object()) throw ConfigError(std::string(key) + ": expected an object");
  for (const auto& [k, v] : s.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw ConfigError(std::string(key) + "." + k + ": unknown field");
    }
  }
  return s;
}

std::string rounding_name(RoundingMode m) {
  return m == RoundingMode::nearest ? "nearest" : "detection_up";
}

}  // namespace

RunConfig::RunConfig() {
  for (int k = 1; k <= 22; ++k) sweep_t0_fracs.push_back(0.02 * k);
}

void RunConfig::validate() const {
  auto positive = [](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(field) + ": must be positive and finite");
    }
  };
  positive(distance_um, "channel.distance_um");
  positive(receiver_radius_um, "channel.receiver_radius_um");
  positive(D0, "channel.D0_m2_per_s");
  positive(R0_nm, "channel.R0_nm");
  positive(symbol_duration_s, "channel.symbol_duration_s");
  if (sizes_nm.empty()) throw ConfigError("particles.sizes_nm: at least one size is required");
  for (double s : sizes_nm) positive(s, "particles.sizes_nm");
  for (std::size_t i = 0; i < sizes_nm.size(); ++i) {
    for (std::size_t k = i + 1; k < sizes_nm.size(); ++k) {
      if (sizes_nm[i] == sizes_nm[k]) throw ConfigError("particles.sizes_nm: duplicate size");
    }
  }
  if (single_size_nm) positive(*single_size_nm, "particles.single_size_nm");
  if (n_d != 0 && n_d != 2 && n_d != 3) throw ConfigError("particles.n_d: must be 0, 2 or 3");
  if (samples_per_symbol < 2) throw ConfigError("samples_per_symbol: must be at least 2");
  if (!(isi_rel_tol > 0.0 && isi_rel_tol <= 1e-3)) {
    throw ConfigError("isi_rel_tol: must lie in (0, 1e-3]");
  }
  if (!(xi_det >= 0.0) || !std::isfinite(xi_det)) {
    throw ConfigError("detection.xi_det: must be nonnegative");
  }
  positive(xi_isi, "detection.xi_isi");
  if (!(t0_frac > 0.0 && t0_frac <= 1.0)) throw ConfigError("detection.t0_frac: must lie in (0, 1]");
  if (l0) {
    const std::size_t L0 = window_length(t0_frac, samples_per_symbol);
    if (*l0 > samples_per_symbol - L0) {
      throw ConfigError("detection.l0: window does not fit in the symbol interval");
    }
  }
  if (sweep_t0_fracs.empty()) throw ConfigError("sweep.t0_frac: at least one value is required");
  for (double f : sweep_t0_fracs) {
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("sweep.t0_frac: values must lie in (0, 1]");
  }
  if (sweep_xi_isi.empty()) throw ConfigError("sweep.xi_isi: at least one value is required");
  for (double v : sweep_xi_isi) positive(v, "sweep.xi_isi");
  if (mc_particles < 1) throw ConfigError("validate.n_particles: must be at least 1");
  if (mc_horizon < 1) throw ConfigError("validate.horizon_samples: must be at least 1");
  if (mc_dt_sim) positive(*mc_dt_sim, "validate.dt_sim_s");
  positive(mc_sigma_mult, "validate.sigma_mult");
  if (!(mc_model_allowance >= 0.0)) throw ConfigError("validate.model_allowance: must be >= 0");
  positive(mc_significance, "validate.significance");
  if (out.empty()) throw ConfigError("out: output directory must not be empty");
}

ChannelParams RunConfig::channel() const {
  ChannelParams p;
  p.distance = distance_um * 1e-6;
  p.receiver_radius = receiver_radius_um * 1e-6;
  p.D0 = D0;
  p.R0 = R0_nm * 1e-9;
  p.symbol_duration = symbol_duration_s;
  return p;
}

std::vector<double> RunConfig::radii_nm() const {
  std::vector<double> radii = single_size_nm ? std::vector<double>{*single_size_nm} : sizes_nm;
  std::sort(radii.begin(), radii.end());
  return radii;
}

ParticleSet RunConfig::particles() const {
  // rho from nm values directly, so 10 nm / 25 nm is exactly 0.4
  const std::vector<double> radii = radii_nm();
  return ParticleSet::from_radii(radii, R0_nm, D0, n_d);
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  static const std::vector<std::string> top = {"channel",  "particles", "samples_per_symbol",
                                               "isi_rel_tol", "detection", "sweep",
                                               "validate", "seed", "workers", "out"};
  for (const auto& [k, v] : j.items()) {
    if (std::find(top.begin(), top.end(), k) == top.end()) {
      throw ConfigError(k + ": unknown field");
    }
  }
  RunConfig cfg;
  const json& ch = section(j, "channel", {"distance_um", "receiver_radius_um", "D0_m2_per_s",
                                          "R0_nm", "symbol_duration_s"});
  read_field(ch, "distance_um", cfg.distance_um, "channel");
  read_field(ch, "receiver_radius_um", cfg.receiver_radius_um, "channel");
  read_field(ch, "D0_m2_per_s", cfg.D0, "channel");
  read_field(ch, "R0_nm", cfg.R0_nm, "channel");
  read_field(ch, "symbol_duration_s", cfg.symbol_duration_s, "channel");

  const json& pa = section(j, "particles", {"sizes_nm", "n_d", "single_size_nm"});
  read_field(pa, "sizes_nm", cfg.sizes_nm, "particles");
  read_field(pa, "n_d", cfg.n_d, "particles");
  read_optional(pa, "single_size_nm", cfg.single_size_nm, "particles");

  read_field(j, "samples_per_symbol", cfg.samples_per_symbol, "config");
  read_field(j, "isi_rel_tol", cfg.isi_rel_tol, "config");

  const json& de = section(j, "detection",
                           {"xi_det", "xi_isi", "t0_frac", "l0", "benchmark", "rounding"});
  read_field(de, "xi_det", cfg.xi_det, "detection");
  read_field(de, "xi_isi", cfg.xi_isi, "detection");
  read_field(de, "t0_frac", cfg.t0_frac, "detection");
  read_field(de, "benchmark", cfg.benchmark, "detection");
  if (de.contains("l0")) {
    const json& l0 = de.at("l0");
    if (l0.is_string() && l0.get<std::string>() == "search") {
      cfg.l0.reset();
    } else if (l0.is_number_unsigned()) {
      cfg.l0 = l0.get<std::size_t>();
    } else {
      throw ConfigError("detection.l0: expected \"search\" or a nonnegative integer");
    }
  }
  if (de.contains("rounding")) {
    std::string r;
    read_field(de, "rounding", r, "detection");
    if (r == "nearest") cfg.rounding = RoundingMode::nearest;
    else if (r == "detection_up") cfg.rounding = RoundingMode::detection_up;
    else throw ConfigError("detection.rounding: expected \"nearest\" or \"detection_up\"");
  }

  const json& sw = section(j, "sweep", {"t0_frac", "xi_isi"});
  read_field(sw, "t0_frac", cfg.sweep_t0_fracs, "sweep");
  read_field(sw, "xi_isi", cfg.sweep_xi_isi, "sweep");

  const json& va = section(j, "validate", {"n_particles", "horizon_samples", "dt_sim_s",
                                           "sigma_mult", "model_allowance", "significance"});
  read_field(va, "n_particles", cfg.mc_particles, "validate");
  read_field(va, "horizon_samples", cfg.mc_horizon, "validate");
  read_optional(va, "dt_sim_s", cfg.mc_dt_sim, "validate");
  read_field(va, "sigma_mult", cfg.mc_sigma_mult, "validate");
  read_field(va, "model_allowance", cfg.mc_model_allowance, "validate");
  read_field(va, "significance", cfg.mc_significance, "validate");

  read_field(j, "seed", cfg.seed, "config");
  read_field(j, "workers", cfg.workers, "config");
  read_field(j, "out", cfg.out, "config");
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["channel"] = {{"distance_um", cfg.distance_um},
                  {"receiver_radius_um", cfg.receiver_radius_um},
                  {"D0_m2_per_s", cfg.D0},
                  {"R0_nm", cfg.R0_nm},
                  {"symbol_duration_s", cfg.symbol_duration_s}};
  j["particles"] = {{"sizes_nm", cfg.sizes_nm}, {"n_d", cfg.n_d}};
  j["particles"]["single_size_nm"] =
      cfg.single_size_nm ? json(*cfg.single_size_nm) : json(nullptr);
  j["samples_per_symbol"] = cfg.samples_per_symbol;
  j["isi_rel_tol"] = cfg.isi_rel_tol;
  j["detection"] = {{"xi_det", cfg.xi_det},
                    {"xi_isi", cfg.xi_isi},
                    {"t0_frac", cfg.t0_frac},
                    {"benchmark", cfg.benchmark},
                    {"rounding", rounding_name(cfg.rounding)}};
  j["detection"]["l0"] = cfg.l0 ? json(*cfg.l0) : json("search");
  j["sweep"] = {{"t0_frac", cfg.sweep_t0_fracs}, {"xi_isi", cfg.sweep_xi_isi}};
  j["validate"] = {{"n_particles", cfg.mc_particles},
                   {"horizon_samples", cfg.mc_horizon},
                   {"sigma_mult", cfg.mc_sigma_mult},
                   {"model_allowance", cfg.mc_model_allowance},
                   {"significance", cfg.mc_significance}};
  j["validate"]["dt_sim_s"] = cfg.mc_dt_sim ? json(*cfg.mc_dt_sim) : json(nullptr);
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  j["out"] = cfg.out;
  return j;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config '" + path.string() + "'");
  json j;
  try {
    f >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const RunConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("out");
  j.erase("workers");
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, end);
}

namespace {

SampledChannel build_channel(const RunConfig& cfg) {
  return sample_matrices(cfg.channel(), cfg.particles(), cfg.samples_per_symbol,
                         cfg.isi_rel_tol, cfg.workers);
}

DetectionSpec detection_spec(const RunConfig& cfg) {
  DetectionSpec spec;
  spec.xi_det = cfg.xi_det;
  spec.xi_isi = cfg.xi_isi;
  spec.L0 = window_length(cfg.t0_frac, cfg.samples_per_symbol);
  spec.l0 = cfg.l0;
  return spec;
}

OptimizerOptions optimizer_options(const RunConfig& cfg) {
  OptimizerOptions o;
  o.rounding = cfg.rounding;
  o.workers = cfg.workers;
  return o;
}

// Whether the detection rows alone admit a solution for some offset.
bool detection_alone_feasible(const SampledChannel& sc, const DetectionSpec& spec) {
  const std::size_t first = spec.l0.value_or(0);
  const std::size_t last = spec.l0.value_or(sc.L - spec.L0);
  for (std::size_t l0 = first; l0 <= last; ++l0) {
    LinearProgram lp = build_mixture_lp(sc, spec, l0);
    lp.A_le = Matrix(0, sc.sizes());
    lp.b_le.clear();
    if (solve_lp(lp).status == LpStatus::optimal) return true;
  }
  return false;
}

}  // namespace

int cmd_cir(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const SampledChannel sc = build_channel(cfg);
  const auto nm = cfg.radii_nm();
  CsvFile csv(cfg, "cir");
  std::vector<std::string> header{"t"};
  for (double s : nm) header.push_back("p_" + size_label(s));
  for (double s : nm) header.push_back("pr_" + size_label(s));
  csv.row(header);
  for (std::size_t l = 0; l < sc.L; ++l) {
    std::vector<std::string> cells{format_double(static_cast<double>(l) * sc.dt)};
    for (std::size_t i = 0; i < sc.sizes(); ++i) cells.push_back(format_double(sc.P(l, i)));
    for (std::size_t i = 0; i < sc.sizes(); ++i) cells.push_back(format_double(sc.P_r(l, i)));
    csv.row(cells);
  }
  csv.save(out_path(cfg, "cir.csv"));
  save_effective_config(cfg);
  log << "wrote " << sc.L << " samples for " << sc.sizes() << " sizes to "
      << out_path(cfg, "cir.csv").string() << "\n";
  return kSuccess;
}

int cmd_optimize(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const SampledChannel sc = build_channel(cfg);
  const DetectionSpec spec = detection_spec(cfg);
  const OptimizerOptions opts = optimizer_options(cfg);
  const MixtureResult res = optimize_mixture(sc, spec, opts);
  const auto nm = cfg.radii_nm();

  CsvFile sizes(cfg, "optimize");
  sizes.row("size_nm", "rho", "m", "m_rounded", "count");
  for (std::size_t i = 0; i < sc.sizes(); ++i) {
    sizes.row(nm[i], sc.particles.rho()[i], res.feasible ? res.m[i] : kNaN,
              res.feasible ? res.m_rounded[i] : kNaN,
              res.feasible ? std::to_string(res.counts[i]) : std::string("nan"));
  }
  sizes.save(out_path(cfg, "optimize.csv"));

  CsvFile offsets(cfg, "optimize");
  offsets.row("l0", "t0", "status", "objective");
  for (const OffsetDiagnostic& d : res.per_l0) {
    offsets.row(d.l0, static_cast<double>(d.l0) * sc.dt, std::string(to_string(d.status)),
                d.objective);
  }
  offsets.save(out_path(cfg, "optimize_offsets.csv"));

  std::ostringstream summary;
  summary << "mcpulse " << kVersion << " optimize\n";
  summary << "config_hash " << config_hash(cfg) << "\n";
  summary << "L " << sc.L << " L0 " << spec.L0 << " T0 " << format_double(spec.L0 * sc.dt)
          << " s, xi_det " << format_double(spec.xi_det) << ", xi_isi "
          << format_double(spec.xi_isi) << "\n";
  summary << "feasible " << (res.feasible ? "yes" : "no") << "\n";
  if (res.feasible) {
    summary << "l0_star " << res.l0_star << " (t0 " << format_double(res.l0_star * sc.dt)
            << " s)\n";
    summary << "N " << format_double(res.N) << "\n";
    summary << "N_rounded " << format_double(res.N_rounded) << "\n";
    summary << "rounded_feasible " << (res.rounded_feasible ? "yes" : "no") << "\n";
    for (std::size_t i = 0; i < sc.sizes(); ++i) {
      summary << "  " << size_label(nm[i]) << ": m " << format_double(res.m[i]) << ", n "
              << res.counts[i] << "\n";
    }
  } else {
    summary << (detection_alone_feasible(sc, spec)
                    ? "binding: ISI constraints (P_r m < xi_isi) cannot hold together with "
                      "the detection constraints for any offset\n"
                    : "binding: detection constraints (P m >= xi_det) cannot be met for any "
                      "offset\n");
  }

  if (cfg.benchmark && sc.sizes() > 1) {
    const SingleSizeBenchmark bench = single_size_benchmark(sc, spec, opts);
    CsvFile single(cfg, "optimize");
    single.row("size_nm", "feasible", "N", "l0_star");
    for (std::size_t i = 0; i < sc.sizes(); ++i) {
      const MixtureResult& r = bench.per_size[i];
      single.row(nm[i], r.feasible, r.feasible ? r.N : kNaN,
                 r.feasible ? std::to_string(r.l0_star) : std::string("nan"));
    }
    single.save(out_path(cfg, "optimize_single.csv"));
    summary << "best single size "
            << (bench.best ? size_label(nm[*bench.best]) + " N " +
                                 format_double(bench.per_size[*bench.best].N)
                           : std::string("none feasible"))
            << "\n";
  }
  write_text(out_path(cfg, "summary.txt"), summary.str());
  save_effective_config(cfg);
  log << summary.str();
  return res.feasible ? kSuccess : kInfeasible;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const SampledChannel sc = build_channel(cfg);
  DetectionSpec tmpl = detection_spec(cfg);
  tmpl.l0.reset();
  const auto points =
      sweep_tradeoff(sc, tmpl, cfg.sweep_t0_fracs, cfg.sweep_xi_isi, optimizer_options(cfg));
  const auto nm = cfg.radii_nm();
  // smallest particle, largest diffusion coefficient
  const double D_small = sc.particles.diffusion().front();

  CsvFile csv(cfg, "sweep");
  std::vector<std::string> header{"t0_frac", "L0", "T0", "xi_isi", "feasible_all", "N_all"};
  for (double s : nm) header.push_back("N_single_" + size_label(s));
  for (const char* h : {"best_single_size_nm", "m_min", "m_max", "T0_max_frac"}) header.push_back(h);
  csv.row(header);
  std::size_t feasible = 0;
  for (const SweepPoint& p : points) {
    const AnalyticBounds b = analytic_bounds(sc.params, cfg.xi_det, p.xi_isi, D_small);
    std::vector<std::string> cells{format_double(p.T0_frac), std::to_string(p.L0),
                                   format_double(static_cast<double>(p.L0) * sc.dt),
                                   format_double(p.xi_isi), p.feasible_all ? "1" : "0",
                                   format_double(p.N_all)};
    for (double n : p.N_single) cells.push_back(format_double(n));
    std::string best = "nan";
    if (p.best_single_size) {
      const auto& rho = sc.particles.rho();
      const auto it = std::find(rho.begin(), rho.end(), *p.best_single_size);
      best = format_double(nm[static_cast<std::size_t>(it - rho.begin())]);
    }
    cells.push_back(best);
    cells.push_back(format_double(b.m_min));
    cells.push_back(format_double(b.m_max));
    cells.push_back(format_double(b.T0_max_frac));
    csv.row(cells);
    feasible += p.feasible_all;
  }
  csv.save(out_path(cfg, "sweep.csv"));
  save_effective_config(cfg);
  log << "sweep: " << points.size() << " points, " << feasible << " feasible with all sizes -> "
      << out_path(cfg, "sweep.csv").string() << "\n";
  return kSuccess;
}

int cmd_validate(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const ChannelParams params = cfg.channel();
  const ParticleSet ps = cfg.particles();
  const auto nm = cfg.radii_nm();
  const double sample_dt = cfg.symbol_duration_s / static_cast<double>(cfg.samples_per_symbol);

  CsvFile csv(cfg, "validate");
  csv.row("size_nm", "t", "p_hat", "stderr", "p", "p_sphere", "qualifying", "pass");
  std::ostringstream summary;
  summary << "mcpulse " << kVersion << " validate\n";
  summary << "config_hash " << config_hash(cfg) << "\n";
  summary << "n_particles " << cfg.mc_particles << ", seed " << cfg.seed << ", tolerance "
          << format_double(cfg.mc_sigma_mult) << " stderr + "
          << format_double(cfg.mc_model_allowance) << " p\n";
  bool all_pass = true;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    McConfig mc;
    mc.n_particles = cfg.mc_particles;
    mc.sample_dt = sample_dt;
    mc.dt_sim = cfg.mc_dt_sim.value_or(sample_dt / 10.0);
    mc.horizon = cfg.mc_horizon;
    mc.seed = cfg.seed;
    mc.D = ps.diffusion()[i];
    mc.geometry = params;
    mc.workers = cfg.workers;
    const McEstimate est = simulate_cir(mc);
    std::vector<double> analytic;
    for (double t : est.t_grid) analytic.push_back(cir_eval(t, mc.D, params));
    const ValidationReport rep = validate_cir(est, analytic, cfg.mc_sigma_mult,
                                              cfg.mc_model_allowance, cfg.mc_significance);
    for (const SampleCheck& s : rep.samples) {
      csv.row(nm[i], s.t, s.p_hat, s.std_error, s.p, sphere_occupancy(s.t, mc.D, params),
              s.qualifying, s.pass);
    }
    const std::size_t last = est.t_grid.size() - 1;
    const double msd_expected = 6.0 * mc.D * est.t_grid[last];
    const bool msd_ok = std::abs(est.msd[last] - msd_expected) <= 3.0 * est.msd_std_error[last];
    summary << size_label(nm[i]) << ": " << rep.qualifying_pass << "/" << rep.qualifying
            << " qualifying samples pass (" << format_double(rep.pass_fraction) << "), msd "
            << format_double(est.msd[last]) << " vs " << format_double(msd_expected)
            << (msd_ok ? " ok" : " FAIL") << ", " << (rep.overall_pass ? "PASS" : "FAIL")
            << "\n";
    all_pass = all_pass && rep.overall_pass && msd_ok;
  }
  summary << "overall " << (all_pass ? "PASS" : "FAIL") << "\n";
  csv.save(out_path(cfg, "validate.csv"));
  write_text(out_path(cfg, "validate_summary.txt"), summary.str());
  save_effective_config(cfg);
  log << summary.str();
  return all_pass ? kSuccess : kFailure;
}

int run_command(const std::string& name, const RunConfig& cfg, std::ostream& log,
                std::ostream& err) {
  try {
    if (name == "cir") return cmd_cir(cfg, log);
    if (name == "optimize") return cmd_optimize(cfg, log);
    if (name == "sweep") return cmd_sweep(cfg, log);
    if (name == "validate") return cmd_validate(cfg, log);
    err << "unknown command '" << name << "'\n";
    return kInvalidConfig;
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const std::domain_error& e) {
    err << "invalid config: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace mcpulse::cli

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "mcpulse/mcvalidate.hpp"
#include "mcpulse/optimizer.hpp"
#include "oracles.hpp"

using namespace mcpulse;
namespace fs = std::filesystem;

namespace {

const std::vector<double> kSizes{10, 30, 50, 70, 90, 110};
constexpr double kD0 = 8e-12;

const SampledChannel& baseline() {
  static const SampledChannel sc =
      sample_matrices(ChannelParams{}, ParticleSet::from_radii(kSizes, 25.0, kD0, 3), 600);
  return sc;
}

SampledChannel only(std::size_t i) {
  const std::size_t idx[] = {i};
  return baseline().select(idx);
}

DetectionSpec spec(double frac, double xi_isi) {
  DetectionSpec s;
  s.xi_isi = xi_isi;
  s.L0 = window_length(frac, 600);
  return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Outcome {
  bool pass;
  std::string detail;
};

// ---------------------------------------------------------------------------

Outcome single_size_values() {
  std::ostringstream d;
  bool any = false;
  for (double frac : {0.25, 0.3}) {
    const auto n10 = optimize_mixture(only(0), spec(frac, 8.0));
    const auto n50 = optimize_mixture(only(2), spec(frac, 8.0));
    const auto n110 = optimize_mixture(only(5), spec(frac, 15.0));
    const auto n110_8 = optimize_mixture(only(5), spec(frac, 8.0));
    auto within = [](const MixtureResult& r, double target) {
      return r.feasible && rel(r.N, target) <= 0.15;
    };
    const bool ok = within(n10, 3.2e6) && within(n50, 3.4e5) && within(n110, 1.0e5) &&
                    !n110_8.feasible;
    any = any || ok;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "T0=%.2fT: N10=%.3g N50=%.3g N110(xi15)=%.3g N110(xi8)=%s; ", frac,
                  n10.feasible ? n10.N : NAN, n50.feasible ? n50.N : NAN,
                  n110.feasible ? n110.N : NAN, n110_8.feasible ? "feasible" : "infeasible");
    d << buf;
  }
  d << "targets 3.2e6/3.4e5/1.0e5 +-15%";
  return {any, d.str()};
}

Outcome lower_bound() {
  DetectionSpec s;
  s.L0 = 1;
  const auto r = optimize_mixture(only(5), s);
  const double m_min = analytic_bounds(ChannelParams{}, 15.0, 8.0, kD0).m_min;
  const bool ok = r.feasible && rel(r.N, m_min) <= 0.05;
  char buf[160];
  std::snprintf(buf, sizeof buf, "N(110 nm, L0=1)=%.6g, m_min=%.6g, rel diff %.2e",
                r.feasible ? r.N : NAN, m_min, r.feasible ? rel(r.N, m_min) : NAN);
  return {ok, buf};
}

struct Boundary {
  double xi;
  std::size_t L0;
  double frac;
  double limit;
  double N;
  double m_max;
};

std::vector<Boundary> boundaries() {
  static std::vector<Boundary> out = [] {
    std::vector<Boundary> v;
    const SampledChannel sc = only(0);
    const double D = sc.particles.diffusion()[0];
    for (double xi : {6.0, 8.0, 10.0}) {
      DetectionSpec s;
      s.xi_isi = xi;
      const std::size_t L0 = feasibility_boundary(sc, s);
      s.L0 = std::max<std::size_t>(L0, 1);
      const auto r = optimize_mixture(sc, s);
      const AnalyticBounds b = analytic_bounds(sc.params, 15.0, xi, D);
      v.push_back({xi, L0, static_cast<double>(L0) / 600.0, b.T0_max_frac,
                   r.feasible ? r.N : NAN, b.m_max});
    }
    return v;
  }();
  return out;
}

Outcome feasibility_limit() {
  bool ok = true;
  std::ostringstream d;
  for (const Boundary& b : boundaries()) {
    const bool this_ok = b.frac <= b.limit && b.frac >= 0.9 * b.limit;
    ok = ok && this_ok;
    char buf[128];
    std::snprintf(buf, sizeof buf, "xi_isi=%g: %.4f vs %.4f (ratio %.3f); ", b.xi, b.frac,
                  b.limit, b.frac / b.limit);
    d << buf;
  }
  return {ok, d.str()};
}

Outcome upper_bound() {
  bool ok = true;
  std::ostringstream d;
  for (const Boundary& b : boundaries()) {
    const bool this_ok = std::isfinite(b.N) && rel(b.N, b.m_max) <= 0.10;
    ok = ok && this_ok;
    char buf[128];
    std::snprintf(buf, sizeof buf, "xi_isi=%g: N=%.5g m_max=%.5g (ratio %.3f); ", b.xi, b.N,
                  b.m_max, b.N / b.m_max);
    d << buf;
  }
  return {ok, d.str()};
}

Outcome dominance() {
  std::vector<double> fracs;
  for (int k = 1; k <= 22; ++k) fracs.push_back(0.02 * k);
  const std::vector<double> xis{6, 8, 10};
  OptimizerOptions opt;
  opt.workers = 0;
  const auto pts = sweep_tradeoff(baseline(), DetectionSpec{}, fracs, xis, opt);
  std::size_t violations = 0, checked = 0;
  for (const SweepPoint& p : pts) {
    double best = INFINITY;
    for (double n : p.N_single) {
      if (!std::isnan(n)) best = std::min(best, n);
    }
    if (std::isfinite(best)) {
      ++checked;
      if (!p.feasible_all || p.N_all > best * (1.0 + 1e-6)) ++violations;
    }
  }

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> frac(0.02, 0.42);
  std::uniform_int_distribution<int> xi_pick(0, 2);
  std::size_t cases = 0, bad = 0;
  while (cases < 120) {
    int a = static_cast<int>(rng() % 63) + 1;
    int b = a | static_cast<int>(rng() % 64);
    if (b == a) b = a | (1 << (rng() % 6));
    if (b == a) continue;
    std::vector<std::size_t> sa, sb;
    for (std::size_t i = 0; i < 6; ++i) {
      if (a >> i & 1) sa.push_back(i);
      if (b >> i & 1) sb.push_back(i);
    }
    const DetectionSpec s = spec(frac(rng), xis[static_cast<std::size_t>(xi_pick(rng))]);
    const auto ra = optimize_mixture(baseline().select(sa), s, opt);
    const auto rb = optimize_mixture(baseline().select(sb), s, opt);
    ++cases;
    if (ra.feasible && (!rb.feasible || rb.N > ra.N * (1.0 + 1e-6))) ++bad;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "sweep: %zu/%zu points dominate; random subset pairs: %zu/%zu hold", checked - violations,
                checked, cases - bad, cases);
  return {violations == 0 && bad == 0 && checked > 0, buf};
}

Outcome lp_oracle() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> coef(-6, 6), rhs(-12, 12), pos(1, 9);
  std::uniform_int_distribution<std::size_t> nv(1, 4), nc(1, 6);
  std::size_t agree = 0, optimal = 0, infeasible = 0;
  constexpr std::size_t kCases = 600;
  for (std::size_t trial = 0; trial < kCases; ++trial) {
    const std::size_t n = nv(rng), m = nc(rng);
    oracle::DenseLp d;
    for (std::size_t j = 0; j < n; ++j) d.c.push_back(pos(rng));
    LinearProgram lp(n);
    std::vector<std::vector<double>> ge, le;
    for (std::size_t r = 0; r < m; ++r) {
      std::vector<double> row(n);
      for (double& v : row) v = coef(rng);
      if (rng() & 1) {
        d.ge.push_back(row);
        d.b_ge.push_back(rhs(rng));
      } else {
        d.le.push_back(row);
        d.b_le.push_back(rhs(rng));
      }
    }
    lp.c = d.c;
    lp.A_ge = Matrix(d.ge.size(), n);
    lp.A_le = Matrix(d.le.size(), n);
    for (std::size_t r = 0; r < d.ge.size(); ++r)
      for (std::size_t j = 0; j < n; ++j) lp.A_ge(r, j) = d.ge[r][j];
    for (std::size_t r = 0; r < d.le.size(); ++r)
      for (std::size_t j = 0; j < n; ++j) lp.A_le(r, j) = d.le[r][j];
    lp.b_ge = d.b_ge;
    lp.b_le = d.b_le;

    const LpResult res = solve_lp(lp);
    const auto ref = oracle::brute_force_lp(d);
    bool same = false;
    if (!ref.feasible) {
      same = res.status == LpStatus::infeasible;
      ++infeasible;
    } else {
      ++optimal;
      same = res.status == LpStatus::optimal &&
             std::abs(*res.objective - ref.objective) <= 1e-7 * std::max(1.0, std::abs(ref.objective));
    }
    agree += same;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu/%zu random LPs agree (%zu optimal, %zu infeasible)", agree,
                kCases, optimal, infeasible);
  return {agree == kCases, buf};
}

Outcome isi_series_check() {
  const ChannelParams p;
  const oracle::Geometry g;
  double worst = 0.0;
  std::size_t n = 0;
  for (int k = 0; k <= 6; ++k) {
    const double D = kD0 / 4.4 * std::pow(11.0, k / 6.0);  // 110 nm .. 10 nm
    for (double t : {0.0, 0.2, 30.0, 90.0, 119.8}) {
      const double ref = oracle::isi_brute_force(t, D, g);
      worst = std::max(worst, rel(isi_eval(t, D, p, 1e-6), ref));
      ++n;
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu points, worst relative difference %.2e (limit 1e-5)", n,
                worst);
  return {worst <= 1e-5, buf};
}

Outcome monte_carlo() {
  McConfig cfg;
  cfg.n_particles = 200'000;
  cfg.seed = 0;
  cfg.D = kD0;
  cfg.workers = 0;
  const McEstimate est = simulate_cir(cfg);
  std::vector<double> analytic;
  for (double t : est.t_grid) analytic.push_back(cir_eval(t, cfg.D, cfg.geometry));
  const ValidationReport rep = validate_cir(est, analytic, 3.0, 0.03);
  const std::size_t last = est.t_grid.size() - 1;
  const double msd_expected = 6.0 * cfg.D * est.t_grid[last];
  const double msd_z = (est.msd[last] - msd_expected) / est.msd_std_error[last];
  const bool msd_ok = std::abs(msd_z) <= 3.0;
  std::string failing;
  for (const SampleCheck& s : rep.samples) {
    if (s.qualifying && !s.pass) {
      char b[96];
      std::snprintf(b, sizeof b, " t=%.1fs(p_hat %.3g vs %.3g)", s.t, s.p_hat, s.p);
      failing += b;
    }
  }
  char buf[400];
  std::snprintf(buf, sizeof buf,
                "n=2e5 seed 0: %zu/%zu qualifying samples pass (%.4f, need 0.99)%s%s; msd z=%.2f",
                rep.qualifying_pass, rep.qualifying, rep.pass_fraction,
                failing.empty() ? "" : "; failing:", failing.c_str(), msd_z);
  return {rep.overall_pass && msd_ok, buf};
}

Outcome determinism() {
  using cli::RunConfig;
  const fs::path root = fs::temp_directory_path() / "mcpulse_acceptance";
  fs::remove_all(root);
  auto files_of = [](const fs::path& dir) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : fs::directory_iterator(dir)) {
      std::ifstream f(e.path(), std::ios::binary);
      std::ostringstream s;
      s << f.rdbuf();
      out.emplace_back(e.path().filename().string(), s.str());
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  std::size_t compared = 0;
  bool ok = true;
  for (const std::string cmd : {"cir", "optimize", "sweep", "validate"}) {
    RunConfig cfg;
    cfg.mc_particles = 20'000;
    cfg.mc_horizon = 40;
    std::vector<std::vector<std::pair<std::string, std::string>>> runs;
    for (unsigned workers : {1u, 3u, 1u}) {
      cfg.workers = workers;
      cfg.out = (root / (cmd + std::to_string(runs.size()))).string();
      std::ostringstream log, err;
      cli::run_command(cmd, cfg, log, err);
      runs.push_back(files_of(cfg.out));
    }
    for (std::size_t k = 1; k < runs.size(); ++k) ok = ok && runs[k] == runs[0];
    ok = ok && !runs[0].empty();
    compared += runs[0].size();
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "4 commands x 3 runs (workers 1, 3, 1), %zu output files compared byte for byte",
                compared);
  return {ok, buf};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"1 single-size peak detection values", single_size_values},
      {"2 lower-bound tightness", lower_bound},
      {"3 small-particle feasibility boundary", feasibility_limit},
      {"4 upper-bound consistency", upper_bound},
      {"5 dominance", dominance},
      {"6 LP oracle equivalence", lp_oracle},
      {"7 ISI-series correctness", isi_series_check},
      {"8 Monte Carlo validation", monte_carlo},
      {"9 determinism", determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  criterion %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}

#include "mcpulse/mcvalidate.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mcpulse/parallel.hpp"
#include "mcpulse/philox.hpp"

namespace mcpulse {

namespace {

constexpr std::uint64_t kChunk = 4096;

struct ChunkTally {
  std::vector<std::uint64_t> counts;
  std::vector<double> sq;    // sum |x|^2
  std::vector<double> quad;  // sum |x|^4
};

std::size_t steps_per_sample(const McConfig& cfg) {
  const double ratio = cfg.sample_dt / cfg.dt_sim;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
    throw std::domain_error("sample_dt must be a whole multiple of dt_sim");
  }
  return static_cast<std::size_t>(rounded);
}

void check_config(const McConfig& cfg) {
  cfg.geometry.validate();
  if (cfg.n_particles < 1) throw std::domain_error("n_particles must be at least 1");
  if (!(cfg.dt_sim > 0.0)) throw std::domain_error("dt_sim must be positive");
  if (!(cfg.sample_dt > 0.0)) throw std::domain_error("sample_dt must be positive");
  if (cfg.horizon < 1) throw std::domain_error("horizon must be at least one sample");
  if (!(cfg.D >= 0.0) || !std::isfinite(cfg.D)) {
    throw std::domain_error("diffusion coefficient must be nonnegative");
  }
}

// Walks particles [first, first + n) and tallies occupancy and squared
// displacement at every sample instant.
void walk(const McConfig& cfg, double D, std::uint64_t first, std::uint64_t n,
          std::size_t steps, ChunkTally& tally) {
  const std::size_t H = cfg.horizon;
  tally.counts.assign(H, 0);
  tally.sq.assign(H, 0.0);
  tally.quad.assign(H, 0.0);
  const double sigma = std::sqrt(2.0 * D * cfg.dt_sim);
  const double d = cfg.geometry.distance;
  const double a2 = cfg.geometry.receiver_radius * cfg.geometry.receiver_radius;
  const Philox4x32::Key key{static_cast<std::uint32_t>(cfg.seed),
                            static_cast<std::uint32_t>(cfg.seed >> 32)};
  constexpr double two_pi = 2.0 * std::numbers::pi;

  for (std::uint64_t p = first; p < first + n; ++p) {
    double x = 0.0, y = 0.0, z = 0.0;
    std::uint64_t step = 0;
    for (std::size_t l = 0; l < H; ++l) {
      if (l > 0) {
        for (std::size_t s = 0; s < steps; ++s, ++step) {
          const auto w = Philox4x32::generate(
              {static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(p >> 32),
               static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32)},
              key);
          // Box-Muller on two uniform pairs; three of the four normals are used.
          const double r1 = sigma * std::sqrt(-2.0 * std::log(uint32_to_open_unit(w[0])));
          const double r2 = sigma * std::sqrt(-2.0 * std::log(uint32_to_open_unit(w[2])));
          const double a1 = two_pi * uint32_to_open_unit(w[1]);
          const double a2n = two_pi * uint32_to_open_unit(w[3]);
          x += r1 * std::cos(a1);
          y += r1 * std::sin(a1);
          z += r2 * std::cos(a2n);
        }
      }
      const double r2sq = x * x + y * y + z * z;
      const double dx = x - d;
      if (dx * dx + y * y + z * z <= a2) ++tally.counts[l];
      tally.sq[l] += r2sq;
      tally.quad[l] += r2sq * r2sq;
    }
  }
}

std::vector<ChunkTally> walk_chunked(const McConfig& cfg, double D, std::uint64_t first,
                                     std::uint64_t n) {
  const std::size_t steps = steps_per_sample(cfg);
  const std::size_t chunks = static_cast<std::size_t>((n + kChunk - 1) / kChunk);
  std::vector<ChunkTally> tallies(chunks);
  parallel_for(chunks, cfg.workers, [&](std::size_t c) {
    const std::uint64_t begin = first + c * kChunk;
    const std::uint64_t len = std::min<std::uint64_t>(kChunk, first + n - begin);
    walk(cfg, D, begin, len, steps, tallies[c]);
  });
  return tallies;
}

}  // namespace

std::vector<std::uint64_t> simulate_counts(const McConfig& cfg, std::uint64_t first,
                                           std::uint64_t n) {
  check_config(cfg);
  std::vector<std::uint64_t> counts(cfg.horizon, 0);
  for (const ChunkTally& t : walk_chunked(cfg, cfg.D, first, n)) {
    for (std::size_t l = 0; l < counts.size(); ++l) counts[l] += t.counts[l];
  }
  return counts;
}

McEstimate simulate_cir(const McConfig& cfg) {
  check_config(cfg);
  const std::vector<ChunkTally> tallies = walk_chunked(cfg, cfg.D, 0, cfg.n_particles);
  const std::size_t H = cfg.horizon;
  const double n = static_cast<double>(cfg.n_particles);

  McEstimate est;
  est.n_particles = cfg.n_particles;
  est.t_grid.resize(H);
  est.p_hat.resize(H);
  est.std_error.resize(H);
  est.counts.assign(H, 0);
  est.msd.resize(H);
  est.msd_std_error.resize(H);
  for (std::size_t l = 0; l < H; ++l) {
    double sq = 0.0, quad = 0.0;
    for (const ChunkTally& t : tallies) {  // fixed chunk order
      est.counts[l] += t.counts[l];
      sq += t.sq[l];
      quad += t.quad[l];
    }
    est.t_grid[l] = static_cast<double>(l) * cfg.sample_dt;
    const double p = static_cast<double>(est.counts[l]) / n;
    est.p_hat[l] = p;
    est.std_error[l] = std::sqrt(p * (1.0 - p) / n);
    est.msd[l] = sq / n;
    const double var = std::max(quad / n - est.msd[l] * est.msd[l], 0.0);
    est.msd_std_error[l] = std::sqrt(var / n);
  }
  return est;
}

std::vector<double> simulate_mixture(const McConfig& cfg, std::span<const Population> pops) {
  check_config(cfg);
  std::vector<double> total(cfg.horizon, 0.0);
  std::uint64_t offset = 0;
  for (const Population& pop : pops) {
    std::vector<std::uint64_t> counts(cfg.horizon, 0);
    for (const ChunkTally& t : walk_chunked(cfg, pop.D, offset, pop.count)) {
      for (std::size_t l = 0; l < counts.size(); ++l) counts[l] += t.counts[l];
    }
    for (std::size_t l = 0; l < total.size(); ++l) {
      total[l] += pop.weight * static_cast<double>(counts[l]);
    }
    offset += pop.count;
  }
  return total;
}

double sphere_occupancy(double t, double D, const ChannelParams& params) {
  if (t <= 0.0) return 0.0;
  const double d = params.distance;
  const double q = 4.0 * D * t;
  const double norm = 1.0 / std::pow(std::numbers::pi * q, 1.5);
  // Gaussian kernel integrated over the shell of radius r about the receiver
  // center: 4 pi r D t / d [exp(-(d-r)^2/q) - exp(-(d+r)^2/q)].
  auto shell = [&](double r) {
    return norm * 4.0 * std::numbers::pi * r * D * t / d *
           (std::exp(-(d - r) * (d - r) / q) - std::exp(-(d + r) * (d + r) / q));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      shell, 0.0, params.receiver_radius, 10, 1e-12);
}

std::vector<double> point_receiver_bias(std::span<const double> t_grid, double D,
                                        const ChannelParams& params) {
  std::vector<double> bias(t_grid.size(), 0.0);
  for (std::size_t l = 0; l < t_grid.size(); ++l) {
    const double p = cir_eval(t_grid[l], D, params);
    if (p > 0.0) bias[l] = sphere_occupancy(t_grid[l], D, params) / p - 1.0;
  }
  return bias;
}

ValidationReport validate_cir(const McEstimate& est, std::span<const double> analytic,
                              double sigma_mult, double model_allowance, double significance) {
  if (analytic.size() != est.p_hat.size() || est.std_error.size() != est.p_hat.size()) {
    throw std::invalid_argument("analytic and simulated grids differ in length");
  }
  const double n = static_cast<double>(est.n_particles);
  ValidationReport report;
  report.samples.reserve(analytic.size());
  for (std::size_t l = 0; l < analytic.size(); ++l) {
    SampleCheck s{};
    s.t = l < est.t_grid.size() ? est.t_grid[l] : 0.0;
    s.p_hat = est.p_hat[l];
    s.std_error = est.std_error[l];
    s.p = analytic[l];
    s.pass = std::abs(s.p_hat - s.p) <= sigma_mult * s.std_error + model_allowance * s.p;
    const double model_se = std::sqrt(std::max(s.p * (1.0 - s.p), 0.0) / n);
    s.qualifying = s.p > 0.0 && s.p > significance * model_se;
    if (s.qualifying) {
      ++report.qualifying;
      if (s.pass) ++report.qualifying_pass;
    }
    report.samples.push_back(s);
  }
  if (report.qualifying > 0) {
    report.pass_fraction =
        static_cast<double>(report.qualifying_pass) / static_cast<double>(report.qualifying);
  }
  report.overall_pass = report.qualifying > 0 && report.pass_fraction >= kRequiredPassFraction;
  return report;
}

}  // namespace mcpulse

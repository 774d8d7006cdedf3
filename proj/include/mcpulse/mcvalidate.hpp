#pragma once

// Particle-level Brownian motion simulation used as an independent check of
// the analytic CIR. The receiver is transparent, so particles move freely and
// are only counted when inside the sphere at a sample instant.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mcpulse/channel.hpp"

namespace mcpulse {

struct McConfig {
  std::uint64_t n_particles = 200'000;
  double sample_dt = 0.2;      // spacing of the reported samples [s]
  double dt_sim = 0.02;        // integration step [s]; sample_dt must be a multiple
  std::size_t horizon = 100;   // number of samples, starting at t = 0
  std::uint64_t seed = 0;
  double D = 8e-12;
  ChannelParams geometry;
  unsigned workers = 1;
};

struct McEstimate {
  std::vector<double> t_grid;
  std::vector<double> p_hat;
  std::vector<double> std_error;       // sqrt(p_hat (1 - p_hat) / n)
  std::vector<std::uint64_t> counts;    // particles inside per sample
  std::vector<double> msd;              // mean |x|^2 [m^2]
  std::vector<double> msd_std_error;       // standard error of msd
  std::uint64_t n_particles = 0;
};

/// Particles [first, first + n) of the stream defined by cfg.seed. Particle
/// i always draws the same increments, so counts from disjoint index ranges
/// add up to the count of the union.
std::vector<std::uint64_t> simulate_counts(const McConfig& cfg, std::uint64_t first,
                                           std::uint64_t n);

/// Throws std::domain_error on invalid configuration.
McEstimate simulate_cir(const McConfig& cfg);

struct Population {
  double D;
  std::uint64_t count;
  double weight;  // detection value per particle, e.g. rho^{n_d}
};

/// Total detection value sum_p weight_p * count_p(t) for populations that
/// occupy consecutive particle-index ranges of one stream.
std::vector<double> simulate_mixture(const McConfig& cfg, std::span<const Population> pops);

/// Exact probability that a free-space Gaussian spread from the origin lies
/// inside the receiver sphere (Gauss-Kronrod over the radial shells).
double sphere_occupancy(double t, double D, const ChannelParams& params);

/// Relative bias of the point-receiver CIR, sphere_occupancy / cir_eval - 1,
/// per grid time (0 where the CIR vanishes).
std::vector<double> point_receiver_bias(std::span<const double> t_grid, double D,
                                        const ChannelParams& params);

struct SampleCheck {
  double t;
  double p_hat;
  double std_error;
  double p;
  bool qualifying;
  bool pass;
};

struct ValidationReport {
  std::vector<SampleCheck> samples;
  std::size_t qualifying = 0;
  std::size_t qualifying_pass = 0;
  double pass_fraction = 0.0;  // among qualifying samples
  bool overall_pass = false;
};

inline constexpr double kDefaultSignificance = 5.0;
inline constexpr double kRequiredPassFraction = 0.99;

/// Per sample: pass iff |p_hat - p| <= sigma_mult * stderr + model_allowance * p.
/// A sample qualifies for the overall verdict when p exceeds `significance`
/// binomial standard errors at the analytic value, sqrt(p (1 - p) / n).
/// Overall pass needs at least one qualifying sample and a pass fraction of
/// at least 99 %. Throws std::invalid_argument if the grids differ in length.
ValidationReport validate_cir(const McEstimate& est, std::span<const double> analytic,
                              double sigma_mult, double model_allowance,
                              double significance = kDefaultSignificance);

}  // namespace mcpulse

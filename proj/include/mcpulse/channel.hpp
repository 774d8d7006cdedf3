#pragma once

// Free-space diffusion channel with a transparent spherical receiver.
//
// All quantities are SI (m, s, m^2/s). Received signals are dimensionless
// occupancy probabilities; detection values elsewhere in the library are
// multiples of the single-particle detection value of the reference size.

#include <cstddef>
#include <span>
#include <vector>

namespace mcpulse {

struct ChannelParams {
  double distance = 10e-6;         // transmitter to receiver center [m]
  double receiver_radius = 1e-6;   // [m]
  double D0 = 8e-12;               // reference diffusion coefficient [m^2/s]
  double R0 = 25e-9;               // reference particle radius [m]
  double symbol_duration = 120.0;  // T [s]

  /// Receiver volume 4*pi*a^3/3. Always derived from the radius.
  double volume() const;

  /// Throws std::domain_error naming the offending field.
  void validate() const;
};

/// Relative sizes rho_i = R_i / R0 with their Einstein-relation diffusion
/// coefficients D_i = D0 / rho_i. Sizes are kept strictly increasing.
class ParticleSet {
 public:
  ParticleSet(std::vector<double> rho, double D0, unsigned n_d);

  /// Builds a set from absolute radii (any order, no duplicates).
  static ParticleSet from_radii(std::span<const double> radii, double R0,
                                double D0, unsigned n_d);

  std::size_t size() const { return rho_.size(); }
  const std::vector<double>& rho() const { return rho_; }
  const std::vector<double>& diffusion() const { return D_; }
  unsigned n_d() const { return n_d_; }
  double D0() const { return D0_; }

  /// rho_i^{n_d}: detection value of one particle of size i.
  double detection_weight(std::size_t i) const;

  /// Subset keeping the listed indices (must be increasing).
  ParticleSet select(std::span<const std::size_t> indices) const;

 private:
  std::vector<double> rho_;
  std::vector<double> D_;
  double D0_;
  unsigned n_d_;
};

double relative_size_to_diffusion(double rho, double D0);

/// Occupancy probability of the receiver at time t after an impulsive
/// release. Exactly zero for t <= 0.
double cir_eval(double t, double D, const ChannelParams& params);

struct CirPeak {
  double t_max;
  double p_max;
};

/// Peak of the CIR; p_max does not depend on D.
CirPeak cir_peak(double D, const ChannelParams& params);

/// Result of the worst-case ISI series sum_{k>=1} p(t + kT).
///
/// `partial_sum` is S_K over the first `terms` releases. `tail_bound` is the
/// rigorous upper bound 2C/(T sqrt(t + K T)) on the omitted remainder, so
/// partial_sum <= value <= partial_sum + tail_bound. `value` adds an
/// Euler-Maclaurin estimate of the remainder, accurate to `rel_tol`.
struct IsiSeries {
  double value;
  double partial_sum;
  std::size_t terms;
  double tail_bound;
};

inline constexpr double kDefaultIsiRelTol = 1e-9;

/// Throws std::domain_error unless 0 <= t < T and rel_tol in (0, 1e-3].
IsiSeries isi_series(double t, double D, const ChannelParams& params,
                     double rel_tol = kDefaultIsiRelTol);

double isi_eval(double t, double D, const ChannelParams& params,
                double rel_tol = kDefaultIsiRelTol);

namespace detail {
// Same series without the t < T restriction; used to fold an infinite
// all-ones past into OOK signals observed several intervals later.
IsiSeries release_series(double t, double D, const ChannelParams& params,
                         double rel_tol);
}  // namespace detail

/// zeta(3/2) by direct summation of 10^6 terms with an Euler-Maclaurin tail.
double zeta_three_halves();

/// Small-particle closed form V zeta(3/2) / (4 pi D T)^{3/2} of p_r(0; D).
double isi_at_zero_small_particle(double D, const ChannelParams& params);

struct AnalyticBounds {
  double t_max;        // [s], for D_small
  double p_max;        // peak CIR value
  double m_min;        // xi_det / p_max
  double m_max;        // xi_isi / p_r(0; D_small), small-particle closed form
  double T0_max_frac;  // (xi_isi / (xi_det zeta(3/2)))^{2/3}
};

AnalyticBounds analytic_bounds(const ChannelParams& params, double xi_det,
                               double xi_isi, double D_small);

/// Detection duration of the small-particle limit (exponential factor = 1):
/// the single root of m V / (4 pi D t)^{3/2} = xi_det.
double small_particle_duration(double m, double D, const ChannelParams& params,
                               double xi_det);

}  // namespace mcpulse

#include "mcpulse/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mcpulse {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::domain_error(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

double ChannelParams::volume() const {
  return 4.0 * kPi * receiver_radius * receiver_radius * receiver_radius / 3.0;
}

void ChannelParams::validate() const {
  require_positive(distance, "distance");
  require_positive(receiver_radius, "receiver_radius");
  require_positive(D0, "D0");
  require_positive(R0, "R0");
  require_positive(symbol_duration, "symbol_duration");
}

ParticleSet::ParticleSet(std::vector<double> rho, double D0, unsigned n_d)
    : rho_(std::move(rho)), D0_(D0), n_d_(n_d) {
  if (rho_.empty()) throw std::domain_error("particle set needs at least one size");
  require_positive(D0_, "D0");
  for (std::size_t i = 0; i < rho_.size(); ++i) {
    require_positive(rho_[i], "rho");
    if (i > 0 && !(rho_[i] > rho_[i - 1])) {
      throw std::domain_error("relative sizes must be strictly increasing");
    }
  }
  D_.reserve(rho_.size());
  for (double r : rho_) D_.push_back(relative_size_to_diffusion(r, D0_));
}

ParticleSet ParticleSet::from_radii(std::span<const double> radii, double R0,
                                    double D0, unsigned n_d) {
  require_positive(R0, "R0");
  std::vector<double> rho;
  rho.reserve(radii.size());
  for (double r : radii) rho.push_back(r / R0);
  std::sort(rho.begin(), rho.end());
  return ParticleSet(std::move(rho), D0, n_d);
}

double ParticleSet::detection_weight(std::size_t i) const {
  return std::pow(rho_.at(i), static_cast<double>(n_d_));
}

ParticleSet ParticleSet::select(std::span<const std::size_t> indices) const {
  std::vector<double> rho;
  rho.reserve(indices.size());
  for (std::size_t i : indices) rho.push_back(rho_.at(i));
  return ParticleSet(std::move(rho), D0_, n_d_);
}

double relative_size_to_diffusion(double rho, double D0) {
  require_positive(rho, "rho");
  require_positive(D0, "D0");
  return D0 / rho;
}

double cir_eval(double t, double D, const ChannelParams& params) {
  if (t <= 0.0) return 0.0;
  const double d = params.distance;
  const double spread = 4.0 * kPi * D * t;
  return params.volume() / (spread * std::sqrt(spread)) *
         std::exp(-d * d / (4.0 * D * t));
}

CirPeak cir_peak(double D, const ChannelParams& params) {
  require_positive(D, "D");
  const double d = params.distance;
  const double g = 2.0 * kPi * std::numbers::e / 3.0;
  return {d * d / (6.0 * D), params.volume() / (d * d * d * g * std::sqrt(g))};
}

namespace detail {

// Terms f(k) = C u^{-3/2} exp(-beta/u) with u = t + kT. For u >> beta the
// terms fall off like k^{-3/2}, so the remainder after K terms is taken from
// the closed-form integral plus Euler-Maclaurin corrections; K is grown until
// the first neglected correction (f'''/720) is below rel_tol.
IsiSeries release_series(double t, double D, const ChannelParams& params,
                         double rel_tol) {
  const double T = params.symbol_duration;
  const double d = params.distance;
  const double spread = 4.0 * kPi * D;
  const double C = params.volume() / (spread * std::sqrt(spread));
  const double beta = d * d / (4.0 * D);

  auto term = [&](double u) { return C * std::exp(-beta / u) / (u * std::sqrt(u)); };
  auto term_derivative = [&](double u) {
    // d/dk of f, with du/dk = T
    return T * term(u) * (beta / (u * u) - 1.5 / u);
  };
  // integral_K^inf f(k) dk = (C/T) sqrt(pi/beta) erf(sqrt(beta/u_K))
  auto tail_integral = [&](double u) {
    const double y = std::sqrt(beta / u);
    const double erf_ratio = y < 1e-8 ? 1.0 : std::erf(y) * std::sqrt(kPi) / (2.0 * y);
    return C / T * 2.0 / std::sqrt(u) * erf_ratio;
  };

  std::size_t K = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(10.0 * beta / T)));
  double sum = 0.0;
  std::size_t k = 0;
  for (;;) {
    for (; k < K; ++k) sum += term(t + static_cast<double>(k + 1) * T);
    const double u = t + static_cast<double>(K) * T;
    const double tail = tail_integral(u) - 0.5 * term(u) - term_derivative(u) / 12.0;
    // |f'''| ~ C T^3 (3/2)(5/2)(7/2) u^{-9/2}; factor 4 covers the exp terms.
    const double remainder = 4.0 * C * T * T * T * 13.125 / 720.0 / (std::pow(u, 4.5));
    const double value = sum + tail;
    if (remainder <= rel_tol * value || K >= (std::size_t{1} << 26)) {
      return {value, sum, K, 2.0 * C / (T * std::sqrt(u))};
    }
    K *= 2;
  }
}

}  // namespace detail

IsiSeries isi_series(double t, double D, const ChannelParams& params, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol <= 1e-3)) {
    throw std::domain_error("rel_tol must lie in (0, 1e-3]");
  }
  if (!(t >= 0.0 && t < params.symbol_duration)) {
    throw std::domain_error("isi time must lie in [0, T)");
  }
  require_positive(D, "D");
  return detail::release_series(t, D, params, rel_tol);
}

double isi_eval(double t, double D, const ChannelParams& params, double rel_tol) {
  return isi_series(t, D, params, rel_tol).value;
}

double isi_at_zero_small_particle(double D, const ChannelParams& params) {
  const double s = 4.0 * kPi * D * params.symbol_duration;
  return params.volume() * zeta_three_halves() / (s * std::sqrt(s));
}

AnalyticBounds analytic_bounds(const ChannelParams& params, double xi_det,
                               double xi_isi, double D_small) {
  require_positive(xi_det, "xi_det");
  require_positive(xi_isi, "xi_isi");
  const CirPeak peak = cir_peak(D_small, params);
  AnalyticBounds b{};
  b.t_max = peak.t_max;
  b.p_max = peak.p_max;
  b.m_min = xi_det / peak.p_max;
  b.m_max = xi_isi / isi_at_zero_small_particle(D_small, params);
  b.T0_max_frac = std::cbrt(std::pow(xi_isi / (xi_det * zeta_three_halves()), 2.0));
  return b;
}

double small_particle_duration(double m, double D, const ChannelParams& params,
                               double xi_det) {
  require_positive(m, "m");
  require_positive(D, "D");
  require_positive(xi_det, "xi_det");
  const double x = m * params.volume() / xi_det;
  return std::cbrt(x * x) / (4.0 * kPi * D);
}

}  // namespace mcpulse

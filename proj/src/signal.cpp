#include "mcpulse/signal.hpp"

#include <cmath>
#include <stdexcept>

#include "mcpulse/parallel.hpp"

namespace mcpulse {

SampledChannel SampledChannel::select(std::span<const std::size_t> indices) const {
  return {params, particles.select(indices), L, dt, P.select_columns(indices),
          P_r.select_columns(indices)};
}

SampledChannel sample_matrices(const ChannelParams& params, const ParticleSet& particles,
                               std::size_t L, double rel_tol, unsigned workers) {
  params.validate();
  if (L < 2) throw std::domain_error("samples per symbol must be at least 2");
  const std::size_t M = particles.size();
  const double dt = params.symbol_duration / static_cast<double>(L);
  Matrix P(L, M), P_r(L, M);
  parallel_for(M, workers, [&](std::size_t i) {
    const double D = particles.diffusion()[i];
    for (std::size_t l = 0; l < L; ++l) {
      const double t = static_cast<double>(l) * dt;
      P(l, i) = cir_eval(t, D, params);
      P_r(l, i) = isi_eval(t, D, params, rel_tol);
    }
  });
  return {params, particles, L, dt, std::move(P), std::move(P_r)};
}

Mixture Mixture::from_counts(const ParticleSet& particles, std::vector<long long> counts) {
  if (counts.size() != particles.size()) {
    throw std::invalid_argument("count vector length does not match particle set");
  }
  Mixture mix;
  mix.m.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) throw std::domain_error("particle counts must be nonnegative");
    mix.m[i] = particles.detection_weight(i) * static_cast<double>(counts[i]);
  }
  mix.counts = std::move(counts);
  return mix;
}

namespace {

std::vector<double> multiply(const Matrix& A, const Mixture& mix) {
  if (mix.m.size() != A.cols()) {
    throw std::invalid_argument("mixture length does not match number of particle sizes");
  }
  std::vector<double> out(A.rows(), 0.0);
  for (std::size_t r = 0; r < A.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < A.cols(); ++c) acc += A(r, c) * mix.m[c];
    out[r] = acc;
  }
  return out;
}

}  // namespace

SignalVector pulse_shape(const SampledChannel& sc, const Mixture& mix) {
  return {multiply(sc.P, mix), SignalKind::pulse};
}

SignalVector isi_shape(const SampledChannel& sc, const Mixture& mix) {
  return {multiply(sc.P_r, mix), SignalKind::isi};
}

std::vector<SignalVector> ook_signal(const SymbolSequence& seq, const SampledChannel& sc,
                                     const Mixture& mix, long first_interval,
                                     std::size_t horizon, double rel_tol) {
  if (horizon < 1) throw std::domain_error("horizon must be at least one interval");
  if (mix.m.size() != sc.sizes()) {
    throw std::invalid_argument("mixture length does not match number of particle sizes");
  }
  const double T = sc.params.symbol_duration;
  const auto& D = sc.particles.diffusion();
  const long first = seq.first_index;
  const long last = first + static_cast<long>(seq.symbols.size()) - 1;

  std::vector<SignalVector> out;
  out.reserve(horizon);
  for (std::size_t h = 0; h < horizon; ++h) {
    const long j = first_interval + static_cast<long>(h);
    std::vector<double> r(sc.L, 0.0);
    for (std::size_t l = 0; l < sc.L; ++l) {
      const double t = static_cast<double>(l) * sc.dt;
      double acc = 0.0;
      for (long k = first; k <= std::min(last, j); ++k) {
        if (seq.symbols[static_cast<std::size_t>(k - first)] == 0) continue;
        const double tau = t + static_cast<double>(j - k) * T;
        for (std::size_t i = 0; i < D.size(); ++i) acc += mix.m[i] * cir_eval(tau, D[i], sc.params);
      }
      if (seq.ones_before) {
        // releases at k < first with k <= j, i.e. lags q = j - k >= max(j - first + 1, 0)
        const long s = j - first;
        for (std::size_t i = 0; i < D.size(); ++i) {
          if (mix.m[i] == 0.0) continue;
          double folded;
          if (s >= 0) {
            folded = detail::release_series(t + static_cast<double>(s) * T, D[i], sc.params,
                                            rel_tol).value;
          } else {
            folded = cir_eval(t, D[i], sc.params) +
                     detail::release_series(t, D[i], sc.params, rel_tol).value;
          }
          acc += mix.m[i] * folded;
        }
      }
      r[l] = acc;
    }
    out.push_back({std::move(r), SignalKind::ook});
  }
  return out;
}

double peak_detection_value(const Mixture& mix) {
  double n = 0.0;
  for (double v : mix.m) n += v;
  return n;
}

}  // namespace mcpulse

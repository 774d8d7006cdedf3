#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mcpulse/channel.hpp"
#include "mcpulse/matrix.hpp"

namespace mcpulse {

/// CIR and worst-case ISI samples on the grid l * dt, l = 0..L-1, one column
/// per particle size. Sample 0 is the release instant.
struct SampledChannel {
  ChannelParams params;
  ParticleSet particles;
  std::size_t L;
  double dt;
  Matrix P;    // P(l, i) = p(l dt; D_i)
  Matrix P_r;  // P_r(l, i) = p_r(l dt; D_i)

  std::size_t sizes() const { return particles.size(); }

  /// Restriction to a subset of particle sizes.
  SampledChannel select(std::span<const std::size_t> indices) const;
};

/// Throws std::domain_error if L < 2.
SampledChannel sample_matrices(const ChannelParams& params, const ParticleSet& particles,
                               std::size_t L, double rel_tol = kDefaultIsiRelTol,
                               unsigned workers = 1);

/// m_i = rho_i^{n_d} n_i in units of the reference detection value.
struct Mixture {
  std::vector<double> m;
  std::optional<std::vector<long long>> counts;

  static Mixture from_counts(const ParticleSet& particles, std::vector<long long> counts);
};

enum class SignalKind { pulse, isi, ook };

struct SignalVector {
  std::vector<double> values;
  SignalKind kind;
};

/// h = P m. Throws std::invalid_argument on dimension mismatch.
SignalVector pulse_shape(const SampledChannel& sc, const Mixture& mix);

/// h_r = P_r m.
SignalVector isi_shape(const SampledChannel& sc, const Mixture& mix);

/// Binary symbol sequence a_k for k = first_index .. first_index + size - 1.
/// With `ones_before` set, every earlier symbol is 1 (infinite past).
struct SymbolSequence {
  long first_index = 0;
  std::vector<int> symbols;
  bool ones_before = false;
};

/// Average OOK received signal r(t) = sum_k a_k h(t - kT) on the sample grid
/// of intervals first_interval .. first_interval + horizon - 1. The pulse is
/// evaluated from the CIR directly, so contributions older than one interval
/// are exact; an infinite all-ones past is folded with the ISI series.
std::vector<SignalVector> ook_signal(const SymbolSequence& seq, const SampledChannel& sc,
                                     const Mixture& mix, long first_interval,
                                     std::size_t horizon,
                                     double rel_tol = kDefaultIsiRelTol);

/// N = sum_i m_i.
double peak_detection_value(const Mixture& mix);

}  // namespace mcpulse

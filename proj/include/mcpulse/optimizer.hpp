#pragma once

// Mixture design: minimize the peak detection value sum_i m_i subject to
//   P m   >= xi_det   on the detection window,
//   P_r m <  xi_isi   on the same window,
//   m >= 0,
// searched over all window offsets, then rounded to whole particle counts.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "mcpulse/lp.hpp"
#include "mcpulse/signal.hpp"

namespace mcpulse {

struct DetectionSpec {
  double xi_det = 15.0;
  double xi_isi = 8.0;
  std::size_t L0 = 150;               // window length [samples]
  std::optional<std::size_t> l0;      // fixed offset, or search all offsets

  /// Throws std::domain_error if the thresholds or window do not fit L.
  void validate(std::size_t L) const;
};

/// Strict ISI inequality is enforced as <= xi_isi (1 - kStrictMargin).
inline constexpr double kStrictMargin = 1e-9;

struct Windows {
  std::vector<double> w_det;          // xi_det on the window, 0 elsewhere
  std::vector<double> w_isi;          // xi_isi on the window; unused elsewhere
  std::vector<std::size_t> rows;      // the constrained sample indices
};

Windows build_windows(const DetectionSpec& spec, std::size_t l0, std::size_t L);

enum class RoundingMode {
  nearest,        // round half away from zero; violations are reported
  detection_up,   // round sizes up where rounding to nearest breaks detection
};

struct OffsetDiagnostic {
  std::size_t l0;
  LpStatus status;
  double objective;  // NaN unless optimal
};

struct MixtureResult {
  bool feasible = false;
  std::vector<double> m;
  std::vector<double> m_rounded;
  std::vector<long long> counts;
  double N = 0.0;
  double N_rounded = 0.0;
  std::size_t l0_star = 0;
  bool rounded_feasible = false;
  std::vector<OffsetDiagnostic> per_l0;
};

struct OptimizerOptions {
  LpOptions lp;
  RoundingMode rounding = RoundingMode::nearest;
  unsigned workers = 1;
};

/// Builds the linear program for one window offset.
LinearProgram build_mixture_lp(const SampledChannel& sc, const DetectionSpec& spec,
                               std::size_t l0);

/// Minimum-N mixture over all admissible offsets (or the fixed one). Ties in
/// the objective go to the smallest offset. An infeasible problem returns
/// feasible = false with the per-offset diagnostics filled in.
MixtureResult optimize_mixture(const SampledChannel& sc, const DetectionSpec& spec,
                               const OptimizerOptions& options = {});

struct RoundedMixture {
  std::vector<double> m_rounded;
  std::vector<long long> counts;
};

/// counts_i = round(m_i / rho_i^{n_d}), half away from zero.
RoundedMixture round_mixture(const std::vector<double>& m, const ParticleSet& particles);

/// Checks P m >= xi_det and P_r m <= xi_isi on the window rows, with a
/// relative slack of `rel_tol` on each threshold.
bool satisfies_constraints(const SampledChannel& sc, const DetectionSpec& spec,
                           std::size_t l0, const std::vector<double>& m,
                           double rel_tol = 1e-9);

/// Times t1 <= t_max <= t2 with m p(t; D) = xi_det, or nothing when the peak
/// m p_max stays below the threshold.
std::optional<std::pair<double, double>> single_size_duration(double m, double D,
                                                               const ChannelParams& params,
                                                               double xi_det);

struct SingleSizeBenchmark {
  std::vector<MixtureResult> per_size;
  std::optional<std::size_t> best;  // index into the particle set
};

/// optimize_mixture restricted to each single size; best is the feasible size
/// with the smallest N (ties go to the larger size).
SingleSizeBenchmark single_size_benchmark(const SampledChannel& sc, const DetectionSpec& spec,
                                          const OptimizerOptions& options = {});

/// Largest window length L0 for which the problem is feasible (0 if none).
/// Feasibility is monotone in L0, so this bisects.
std::size_t feasibility_boundary(const SampledChannel& sc, DetectionSpec spec,
                                 const OptimizerOptions& options = {});

struct SweepPoint {
  double T0_frac;
  std::size_t L0;
  double xi_isi;
  bool feasible_all;
  double N_all;                        // NaN when infeasible
  std::vector<double> N_single;        // NaN where infeasible
  std::optional<double> best_single_size;  // rho of the single-size minimizer
};

std::size_t window_length(double T0_frac, std::size_t L);

/// Evaluates the grid T0_fracs x xi_isi_values in that order (xi_isi outer).
/// Points are independent; with workers > 1 they run concurrently and are
/// merged in grid order.
std::vector<SweepPoint> sweep_tradeoff(const SampledChannel& sc, const DetectionSpec& tmpl,
                                       const std::vector<double>& T0_fracs,
                                       const std::vector<double>& xi_isi_values,
                                       const OptimizerOptions& options = {});

}  // namespace mcpulse

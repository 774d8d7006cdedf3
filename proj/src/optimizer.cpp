#include "mcpulse/optimizer.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "mcpulse/parallel.hpp"

namespace mcpulse {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

void DetectionSpec::validate(std::size_t L) const {
  if (!(xi_det >= 0.0) || !std::isfinite(xi_det)) {
    throw std::domain_error("xi_det must be nonnegative and finite");
  }
  if (!(xi_isi > 0.0) || !std::isfinite(xi_isi)) {
    throw std::domain_error("xi_isi must be positive and finite");
  }
  if (L0 < 1 || L0 > L) throw std::domain_error("window length L0 must lie in [1, L]");
  if (l0 && *l0 > L - L0) throw std::domain_error("window offset l0 must lie in [0, L - L0]");
}

Windows build_windows(const DetectionSpec& spec, std::size_t l0, std::size_t L) {
  if (spec.L0 < 1 || spec.L0 > L || l0 > L - spec.L0) {
    throw std::domain_error("window offset l0 must lie in [0, L - L0]");
  }
  Windows w;
  w.w_det.assign(L, 0.0);
  w.w_isi.assign(L, std::numeric_limits<double>::infinity());
  w.rows.reserve(spec.L0);
  for (std::size_t l = l0; l < l0 + spec.L0; ++l) {
    w.w_det[l] = spec.xi_det;
    w.w_isi[l] = spec.xi_isi;
    w.rows.push_back(l);
  }
  return w;
}

LinearProgram build_mixture_lp(const SampledChannel& sc, const DetectionSpec& spec,
                               std::size_t l0) {
  const Windows w = build_windows(spec, l0, sc.L);
  const std::size_t M = sc.sizes();
  LinearProgram lp(M);
  lp.c.assign(M, 1.0);
  // A zero detection threshold imposes nothing; dropping the rows keeps the
  // problem free of trivially satisfied constraints.
  const bool detect = spec.xi_det > 0.0;
  lp.A_ge = Matrix(detect ? w.rows.size() : 0, M);
  lp.A_le = Matrix(w.rows.size(), M);
  for (std::size_t r = 0; r < w.rows.size(); ++r) {
    const std::size_t l = w.rows[r];
    for (std::size_t i = 0; i < M; ++i) {
      if (detect) lp.A_ge(r, i) = sc.P(l, i);
      lp.A_le(r, i) = sc.P_r(l, i);
    }
    if (detect) lp.b_ge.push_back(w.w_det[l]);
    lp.b_le.push_back(w.w_isi[l] * (1.0 - kStrictMargin));
  }
  return lp;
}

RoundedMixture round_mixture(const std::vector<double>& m, const ParticleSet& particles) {
  if (m.size() != particles.size()) {
    throw std::invalid_argument("mixture length does not match particle set");
  }
  RoundedMixture out;
  out.m_rounded.resize(m.size());
  out.counts.resize(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] < 0.0) throw std::domain_error("mixture entries must be nonnegative");
    const double w = particles.detection_weight(i);
    out.counts[i] = std::llround(m[i] / w);
    out.m_rounded[i] = w * static_cast<double>(out.counts[i]);
  }
  return out;
}

namespace {

bool detection_holds(const SampledChannel& sc, const DetectionSpec& spec, std::size_t l0,
                     const std::vector<double>& m, double rel_tol) {
  for (std::size_t l = l0; l < l0 + spec.L0; ++l) {
    double h = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) h += sc.P(l, i) * m[i];
    if (h < spec.xi_det * (1.0 - rel_tol)) return false;
  }
  return true;
}

bool isi_holds(const SampledChannel& sc, const DetectionSpec& spec, std::size_t l0,
               const std::vector<double>& m, double rel_tol) {
  for (std::size_t l = l0; l < l0 + spec.L0; ++l) {
    double h = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) h += sc.P_r(l, i) * m[i];
    if (h > spec.xi_isi * (1.0 + rel_tol)) return false;
  }
  return true;
}

std::vector<std::size_t> candidate_offsets(const DetectionSpec& spec, std::size_t L) {
  if (spec.l0) return {*spec.l0};
  std::vector<std::size_t> offsets(L - spec.L0 + 1);
  for (std::size_t l = 0; l < offsets.size(); ++l) offsets[l] = l;
  return offsets;
}

}  // namespace

bool satisfies_constraints(const SampledChannel& sc, const DetectionSpec& spec, std::size_t l0,
                           const std::vector<double>& m, double rel_tol) {
  if (m.size() != sc.sizes()) throw std::invalid_argument("mixture length mismatch");
  return detection_holds(sc, spec, l0, m, rel_tol) && isi_holds(sc, spec, l0, m, rel_tol);
}

MixtureResult optimize_mixture(const SampledChannel& sc, const DetectionSpec& spec,
                               const OptimizerOptions& options) {
  spec.validate(sc.L);
  const std::vector<std::size_t> offsets = candidate_offsets(spec, sc.L);

  MixtureResult result;
  result.per_l0.resize(offsets.size());
  std::vector<std::vector<double>> solutions(offsets.size());
  parallel_for(offsets.size(), options.workers, [&](std::size_t k) {
    const LpResult lp = solve_lp(build_mixture_lp(sc, spec, offsets[k]), options.lp);
    result.per_l0[k] = {offsets[k], lp.status, lp.objective.value_or(kNaN)};
    if (lp.status == LpStatus::optimal) solutions[k] = *lp.x;
  });

  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    if (result.per_l0[k].status != LpStatus::optimal) continue;
    if (!best || result.per_l0[k].objective < result.per_l0[*best].objective) best = k;
  }
  if (!best) return result;

  result.feasible = true;
  result.l0_star = offsets[*best];
  result.m = std::move(solutions[*best]);
  result.N = peak_detection_value(Mixture{result.m, std::nullopt});

  RoundedMixture rounded = round_mixture(result.m, sc.particles);
  if (options.rounding == RoundingMode::detection_up &&
      !detection_holds(sc, spec, result.l0_star, rounded.m_rounded, options.lp.eps_feas)) {
    for (std::size_t i = 0; i < result.m.size(); ++i) {
      const double w = sc.particles.detection_weight(i);
      rounded.counts[i] = static_cast<long long>(std::ceil(result.m[i] / w));
      rounded.m_rounded[i] = w * static_cast<double>(rounded.counts[i]);
    }
  }
  result.m_rounded = std::move(rounded.m_rounded);
  result.counts = std::move(rounded.counts);
  result.N_rounded = peak_detection_value(Mixture{result.m_rounded, std::nullopt});
  result.rounded_feasible =
      satisfies_constraints(sc, spec, result.l0_star, result.m_rounded, options.lp.eps_feas);
  return result;
}

std::optional<std::pair<double, double>> single_size_duration(double m, double D,
                                                               const ChannelParams& params,
                                                               double xi_det) {
  if (!(m > 0.0)) throw std::domain_error("m must be positive");
  const CirPeak peak = cir_peak(D, params);
  const double top = m * peak.p_max;
  if (top < xi_det * (1.0 - 1e-12)) return std::nullopt;
  if (top <= xi_det * (1.0 + 1e-12)) return std::make_pair(peak.t_max, peak.t_max);

  auto excess = [&](double t) { return m * cir_eval(t, D, params) - xi_det; };
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-7; };

  std::uintmax_t iters = 200;
  // Rising edge: the CIR is negligible far before the peak.
  double lo = peak.t_max;
  while (excess(lo) >= 0.0) lo *= 0.5;
  auto r1 = boost::math::tools::toms748_solve(excess, lo, peak.t_max, tol, iters);
  iters = 200;
  double hi = 2.0 * peak.t_max;
  while (excess(hi) >= 0.0) hi *= 2.0;
  auto r2 = boost::math::tools::toms748_solve(excess, peak.t_max, hi, tol, iters);
  return std::make_pair(0.5 * (r1.first + r1.second), 0.5 * (r2.first + r2.second));
}

SingleSizeBenchmark single_size_benchmark(const SampledChannel& sc, const DetectionSpec& spec,
                                          const OptimizerOptions& options) {
  SingleSizeBenchmark out;
  out.per_size.reserve(sc.sizes());
  for (std::size_t i = 0; i < sc.sizes(); ++i) {
    const std::size_t idx[] = {i};
    out.per_size.push_back(optimize_mixture(sc.select(idx), spec, options));
  }
  for (std::size_t i = 0; i < sc.sizes(); ++i) {
    const MixtureResult& r = out.per_size[i];
    if (!r.feasible) continue;
    // Ascending rho, so <= lets a larger size win a tie.
    if (!out.best || r.N <= out.per_size[*out.best].N) out.best = i;
  }
  return out;
}

std::size_t feasibility_boundary(const SampledChannel& sc, DetectionSpec spec,
                                 const OptimizerOptions& options) {
  const std::size_t max_len = spec.l0 ? sc.L - *spec.l0 : sc.L;
  auto feasible = [&](std::size_t len) {
    spec.L0 = len;
    return optimize_mixture(sc, spec, options).feasible;
  };
  if (max_len == 0 || !feasible(1)) return 0;
  std::size_t good = 1, bad = max_len + 1;
  if (feasible(max_len)) return max_len;
  bad = max_len;
  while (bad - good > 1) {
    const std::size_t mid = good + (bad - good) / 2;
    (feasible(mid) ? good : bad) = mid;
  }
  return good;
}

std::size_t window_length(double T0_frac, std::size_t L) {
  if (!(T0_frac > 0.0 && T0_frac <= 1.0)) {
    throw std::domain_error("T0 fraction must lie in (0, 1]");
  }
  const auto len = static_cast<std::size_t>(std::llround(T0_frac * static_cast<double>(L)));
  return std::clamp<std::size_t>(len, 1, L);
}

std::vector<SweepPoint> sweep_tradeoff(const SampledChannel& sc, const DetectionSpec& tmpl,
                                       const std::vector<double>& T0_fracs,
                                       const std::vector<double>& xi_isi_values,
                                       const OptimizerOptions& options) {
  if (T0_fracs.empty() || xi_isi_values.empty()) {
    throw std::domain_error("sweep needs at least one T0 fraction and one xi_isi value");
  }
  for (double f : T0_fracs) window_length(f, sc.L);

  std::vector<SweepPoint> points(T0_fracs.size() * xi_isi_values.size());
  OptimizerOptions inner = options;
  inner.workers = 1;
  parallel_for(points.size(), options.workers, [&](std::size_t k) {
    const double xi = xi_isi_values[k / T0_fracs.size()];
    const double frac = T0_fracs[k % T0_fracs.size()];
    DetectionSpec spec = tmpl;
    spec.xi_isi = xi;
    spec.L0 = window_length(frac, sc.L);
    SweepPoint& p = points[k];
    p.T0_frac = frac;
    p.L0 = spec.L0;
    p.xi_isi = xi;
    if (spec.l0 && *spec.l0 > sc.L - spec.L0) {
      // a fixed offset that leaves no room for the window
      p.feasible_all = false;
      p.N_all = kNaN;
      p.N_single.assign(sc.sizes(), kNaN);
      return;
    }
    const MixtureResult all = optimize_mixture(sc, spec, inner);
    p.feasible_all = all.feasible;
    p.N_all = all.feasible ? all.N : kNaN;
    const SingleSizeBenchmark single = single_size_benchmark(sc, spec, inner);
    for (const MixtureResult& r : single.per_size) p.N_single.push_back(r.feasible ? r.N : kNaN);
    if (single.best) p.best_single_size = sc.particles.rho()[*single.best];
  });
  return points;
}

}  // namespace mcpulse

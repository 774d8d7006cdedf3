#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mcpulse/signal.hpp"

using namespace mcpulse;

namespace {

SampledChannel baseline(std::vector<double> radii_nm = {10, 50, 110}, std::size_t L = 600) {
  return sample_matrices(ChannelParams{}, ParticleSet::from_radii(radii_nm, 25.0, 8e-12, 3), L);
}

}  // namespace

TEST_CASE("sampled matrices") {
  const SampledChannel sc = baseline();
  CHECK(sc.dt == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(static_cast<double>(sc.L) * sc.dt == doctest::Approx(120.0).epsilon(1e-12));
  REQUIRE(sc.P.rows() == 600);
  REQUIRE(sc.P.cols() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(sc.P(0, i) == 0.0);
    std::size_t arg = 0;
    for (std::size_t l = 0; l < sc.L; ++l) {
      CHECK(sc.P(l, i) >= 0.0);
      CHECK(sc.P_r(l, i) > 0.0);
      if (sc.P(l, i) > sc.P(arg, i)) arg = l;
    }
    const double t_max = 1e-10 / (6.0 * sc.particles.diffusion()[i]);
    CHECK(static_cast<long>(arg) == std::lround(t_max / sc.dt));
    // single interior maximum: nondecreasing before, nonincreasing after
    for (std::size_t l = 1; l <= arg; ++l) CHECK(sc.P(l, i) >= sc.P(l - 1, i));
    for (std::size_t l = arg + 1; l < sc.L; ++l) CHECK(sc.P(l, i) <= sc.P(l - 1, i));
    CHECK(sc.P(5, i) == cir_eval(1.0, sc.particles.diffusion()[i], sc.params));
  }
  CHECK_THROWS_AS(sample_matrices(ChannelParams{}, sc.particles, 1), std::domain_error);
}

TEST_CASE("pulse shape linearity") {
  const SampledChannel sc = baseline();
  const auto zero = pulse_shape(sc, {{0, 0, 0}, {}});
  CHECK(zero.kind == SignalKind::pulse);
  CHECK(std::all_of(zero.values.begin(), zero.values.end(), [](double v) { return v == 0.0; }));

  const auto unit = pulse_shape(sc, {{0, 1, 0}, {}});
  for (std::size_t l = 0; l < sc.L; ++l) CHECK(unit.values[l] == sc.P(l, 1));

  const auto a = pulse_shape(sc, {{3.0, 0, 0}, {}});
  const auto b = pulse_shape(sc, {{0, 0, 7.0}, {}});
  const auto ab = pulse_shape(sc, {{3.0, 0, 7.0}, {}});
  for (std::size_t l = 0; l < sc.L; ++l) {
    CHECK(ab.values[l] == doctest::Approx(a.values[l] + b.values[l]).epsilon(1e-15));
  }
  CHECK_THROWS_AS(pulse_shape(sc, {{1.0}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(isi_shape(sc, {{1.0, 2.0}, {}}), std::invalid_argument);
}

TEST_CASE("isi shape") {
  const SampledChannel sc = baseline();
  const auto zero = isi_shape(sc, {{0, 0, 0}, {}});
  CHECK(std::all_of(zero.values.begin(), zero.values.end(), [](double v) { return v == 0.0; }));
  const auto one = isi_shape(sc, {{0, 0, 2.5}, {}});
  CHECK(one.kind == SignalKind::isi);
  CHECK(one.values[0] ==
        doctest::Approx(2.5 * isi_eval(0.0, sc.particles.diffusion()[2], sc.params)));

  // equal m: larger particles leave more residual signal everywhere
  const auto small = isi_shape(sc, {{1, 0, 0}, {}});
  const auto mid = isi_shape(sc, {{0, 1, 0}, {}});
  const auto large = isi_shape(sc, {{0, 0, 1}, {}});
  for (std::size_t l = 0; l < sc.L; ++l) {
    CHECK(small.values[l] < mid.values[l]);
    CHECK(mid.values[l] < large.values[l]);
  }
}

TEST_CASE("mixture from counts") {
  const auto ps = ParticleSet::from_radii(std::vector<double>{25, 50}, 25.0, 8e-12, 3);
  const Mixture mix = Mixture::from_counts(ps, {4, 3});
  CHECK(mix.m[0] == 4.0);
  CHECK(mix.m[1] == 24.0);
  CHECK(peak_detection_value(mix) == 28.0);
  CHECK(peak_detection_value({{1, 2, 3}, {}}) == 6.0);
  CHECK(peak_detection_value({{0, 0}, {}}) == 0.0);
  CHECK_THROWS(Mixture::from_counts(ps, {1}));
  CHECK_THROWS(Mixture::from_counts(ps, {1, -1}));
}

TEST_CASE("ook signal") {
  const SampledChannel sc = baseline();
  const Mixture mix{{2e5, 1e4, 3e3}, {}};

  SUBCASE("all zeros") {
    const auto r = ook_signal({0, {0, 0, 0, 0}, false}, sc, mix, 0, 4);
    REQUIRE(r.size() == 4);
    for (const auto& v : r) {
      CHECK(v.kind == SignalKind::ook);
      CHECK(std::all_of(v.values.begin(), v.values.end(), [](double x) { return x == 0.0; }));
    }
  }
  SUBCASE("one symbol is the pulse shape") {
    const auto r = ook_signal({0, {1}, false}, sc, mix, 0, 1);
    const auto h = pulse_shape(sc, mix);
    for (std::size_t l = 0; l < sc.L; ++l) {
      CHECK(r[0].values[l] == doctest::Approx(h.values[l]).epsilon(1e-14));
    }
  }
  SUBCASE("superposition of symbols") {
    const auto r = ook_signal({0, {1, 0, 1}, false}, sc, mix, 2, 1);
    const auto r0 = ook_signal({0, {1}, false}, sc, mix, 2, 1);
    const auto r2 = ook_signal({2, {1}, false}, sc, mix, 2, 1);
    for (std::size_t l = 0; l < sc.L; ++l) {
      CHECK(r[0].values[l] == doctest::Approx(r0[0].values[l] + r2[0].values[l]).epsilon(1e-14));
    }
  }
  SUBCASE("infinite past of ones equals the isi shape") {
    const auto r = ook_signal({0, {0}, true}, sc, mix, 0, 1);
    const auto hr = isi_shape(sc, mix);
    for (std::size_t l = 0; l < sc.L; ++l) {
      CHECK(r[0].values[l] == doctest::Approx(hr.values[l]).epsilon(1e-12));
    }
  }
  SUBCASE("worst case dominates any other past") {
    const auto worst = ook_signal({-3, {1, 1, 1, 0}, true}, sc, mix, 0, 1);
    const auto some = ook_signal({-3, {1, 0, 1, 0}, false}, sc, mix, 0, 1);
    for (std::size_t l = 0; l < sc.L; ++l) CHECK(some[0].values[l] <= worst[0].values[l]);
  }
}

TEST_CASE("finite past of ones approaches the isi shape") {
  const SampledChannel sc = baseline({10, 110}, 60);
  const Mixture mix{{1.0, 1.0}, {}};
  constexpr long K = 10'000;
  SymbolSequence seq;
  seq.first_index = -K;
  seq.symbols.assign(K + 1, 1);
  seq.symbols.back() = 0;
  const auto r = ook_signal(seq, sc, mix, 0, 1);
  const auto hr = isi_shape(sc, mix);
  const double V = sc.params.volume();
  const double T = sc.params.symbol_duration;
  for (std::size_t l = 0; l < sc.L; ++l) {
    const double t = static_cast<double>(l) * sc.dt;
    double tail = 0.0;  // bound on releases older than K intervals
    for (double D : sc.particles.diffusion()) {
      const double C = V / std::pow(4.0 * std::numbers::pi * D, 1.5);
      tail += 2.0 * C / (T * std::sqrt(t + static_cast<double>(K) * T));
    }
    const double gap = hr.values[l] - r[0].values[l];
    CHECK(gap >= -1e-12 * hr.values[l]);
    CHECK(gap <= tail * (1.0 + 1e-9));
  }
}

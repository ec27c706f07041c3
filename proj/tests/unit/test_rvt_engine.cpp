#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nergpsa/errors.hpp"
#include "nergpsa/rvt_engine.hpp"

using namespace nergpsa;
using doctest::Approx;

namespace {

// Brune-type acceleration spectrum with kappa decay.
EasSpectrum brune(double lo, double hi, double fc = 0.4, double kappa = 0.04) {
  auto g = FrequencyGrid::per_decade(lo, hi, 100);
  std::vector<double> a;
  for (double f : g.freqs()) a.push_back(0.01 * omega_square_shape(f, fc) * std::exp(-std::numbers::pi * kappa * f));
  return {g, a};
}

Scenario scenario() {
  Scenario s;
  s.magnitude = 6.5;
  s.r_rup_km = 20.0;
  s.vs30_ms = 400.0;
  return s;
}

RvtConfig user_config(double d) {
  RvtConfig cfg;
  cfg.duration_source = DurationSource::user;
  cfg.user_d_gm = d;
  cfg.extrapolate = false;
  return cfg;
}

}  // namespace

TEST_CASE("default periods") {
  const auto p = RvtConfig::default_periods();
  CHECK(p.front() == Approx(0.01));
  CHECK(p.back() == Approx(10.0));
  CHECK(p.size() == 61);
}

TEST_CASE("psa is E[PF] sqrt(m0/D_rms)") {
  const auto eas = brune(0.01, 100.0);
  const auto cfg = user_config(8.0);
  const auto osc = Oscillator::from_period(0.3, 0.05);
  const auto d = psa_single(eas, osc, scenario(), cfg);
  const auto filtered = eas.filtered(oscillator_transfer(osc, eas.grid()));
  const auto m = spectral_moments(filtered);
  CHECK(d.m0 == Approx(m.m0).epsilon(1e-14));
  const double drms = 8.0 + oscillator_duration(8.0, osc);
  CHECK(d.d_rms == Approx(drms));
  CHECK(d.n_z == Approx(zero_crossing_rate(m) * 8.0));
  const double pf = expected_peak_factor(d.n_z, bandwidth_delta(m).delta_e).value;
  CHECK(d.psa == Approx(pf * std::sqrt(m.m0 / drms)).epsilon(1e-13));
}

TEST_CASE("psa scales linearly with the spectrum") {
  const auto eas = brune(0.01, 100.0);
  const auto cfg = user_config(8.0);
  const auto a = psa_spectrum(eas, scenario(), cfg);
  const auto b = psa_spectrum(eas.scaled(3.0), scenario(), cfg);
  for (std::size_t i = 0; i < a.psa.size(); ++i) CHECK(b.psa[i] / a.psa[i] == Approx(3.0).epsilon(1e-12));
}

TEST_CASE("long-period psa tends to zero, short-period psa to a plateau") {
  const auto eas = brune(0.01, 100.0);
  const auto s = psa_spectrum(eas, scenario(), user_config(8.0));
  CHECK(s.psa.back() < 0.2 * *std::max_element(s.psa.begin(), s.psa.end()));
  CHECK(s.psa[0] == Approx(s.psa[1]).epsilon(0.02));
}

TEST_CASE("longer motions lower psa") {
  const auto eas = brune(0.01, 100.0);
  const auto osc = Oscillator::from_period(0.2, 0.05);
  CHECK(psa_single(eas, osc, scenario(), user_config(20.0)).psa <
        psa_single(eas, osc, scenario(), user_config(5.0)).psa);
}

TEST_CASE("extrapolation only extends when needed") {
  auto cfg = user_config(8.0);
  cfg.extrapolate = true;
  cfg.stress_table = StressDropTable({3.0, 8.0}, {100.0, 100.0});
  const auto narrow = brune(0.2, 30.0);
  const auto prepared = prepare_spectrum(narrow, scenario(), cfg);
  CHECK(prepared.grid().f_min() == Approx(0.01));
  CHECK(prepared.grid().f_max() == Approx(100.0));
  const auto wide = brune(0.005, 200.0);
  CHECK(prepare_spectrum(wide, scenario(), cfg).grid() == wide.grid());
}

TEST_CASE("shipped configuration evaluates a full spectrum") {
  const auto cfg = RvtConfig::with_shipped_data();
  const auto s = psa_spectrum(brune(0.1, 30.0), scenario(), cfg);
  CHECK(s.psa.size() == cfg.periods.size());
  for (const auto& d : s.diagnostics) {
    CHECK(d.psa > 0.0);
    CHECK(d.d_rms >= d.d_gm);
    CHECK(d.pf > 1.0);
  }
}

TEST_CASE("as96 duration flows into the engine") {
  const auto cfg = RvtConfig::with_shipped_data();
  const auto d = ground_motion_duration(scenario(), cfg);
  CHECK(d.d_gm == Approx(as96_dgm(scenario(), *cfg.as96, 0.85).d_gm));
}

TEST_CASE("config validation") {
  RvtConfig cfg;
  cfg.damping = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = user_config(5.0);
  cfg.periods = {0.1, 0.05};
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = user_config(5.0);
  cfg.user_d_gm.reset();
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = RvtConfig{};
  cfg.as96.reset();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("zero spectrum is degenerate") {
  auto g = FrequencyGrid::per_decade(0.1, 10, 20);
  EasSpectrum zero(g, std::vector<double>(g.size(), 0.0));
  CHECK_THROWS_AS(psa_single(zero, Oscillator(1.0, 0.05), scenario(), user_config(5.0)),
                  DegenerateSpectrumError);
}

TEST_CASE("oscillator far above the band gives the unfiltered peak") {
  auto g = FrequencyGrid::per_decade(0.1, 5.0, 100);
  EasSpectrum eas(g, std::vector<double>(g.size(), 0.01));
  const auto cfg = user_config(10.0);
  const auto m = spectral_moments(eas);
  const double pga = expected_peak_factor(zero_crossing_rate(m) * 10.0, bandwidth_delta(m).delta_e).value *
                     std::sqrt(m.m0 / 10.0);
  const auto d = psa_single(eas, Oscillator::from_period(0.01, 0.05), scenario(), cfg);
  CHECK(d.psa == Approx(pga).epsilon(2e-3));
}

TEST_CASE("flat spectrum gives a smooth psa spectrum") {
  // band encloses every oscillator frequency; a hard band edge inside the grid produces a real step
  auto g = FrequencyGrid::per_decade(0.01, 200.0, 100);
  EasSpectrum eas(g, std::vector<double>(g.size(), 0.01));
  const auto s = psa_spectrum(eas, scenario(), user_config(15.0));
  REQUIRE(s.psa.size() == 61);
  for (std::size_t i = 1; i < s.psa.size(); ++i) {
    INFO(s.periods[i]);
    CHECK(std::abs(s.psa[i] / s.psa[i - 1] - 1.0) < 0.2);
  }
}

TEST_CASE("periods are evaluated independently") {
  const auto eas = brune(0.01, 100.0);
  const auto cfg = user_config(8.0);
  const auto s = psa_spectrum(eas, scenario(), cfg);
  std::vector<std::size_t> order(cfg.periods.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = (i * 37) % order.size();
  for (std::size_t k : order) {
    CHECK(psa_single(eas, Oscillator::from_period(cfg.periods[k], cfg.damping), scenario(), cfg).psa ==
          s.psa[k]);
  }
}

TEST_CASE("M7 scenario peaks between 0.1 and 0.5 s") {
  Scenario scn;
  scn.magnitude = 7.0;
  scn.r_rup_km = 30.0;
  scn.vs30_ms = 400.0;
  const auto cfg = RvtConfig::with_shipped_data();
  const double fc = corner_frequency(scn, &*cfg.stress_table);
  const double kappa = kappa_from_vs30(400.0);
  auto g = FrequencyGrid::per_decade(0.01, 100.0, 100);
  std::vector<double> a;
  for (double f : g.freqs()) a.push_back(omega_square_shape(f, fc) * std::exp(-std::numbers::pi * kappa * f));
  const auto s = psa_spectrum(EasSpectrum(g, a), scn, cfg);
  const auto it = std::max_element(s.psa.begin(), s.psa.end());
  const double t_peak = s.periods[static_cast<std::size_t>(it - s.psa.begin())];
  CHECK(t_peak >= 0.1);
  CHECK(t_peak <= 0.5);
}

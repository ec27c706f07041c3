#include "nergpsa/rvt_engine.hpp"

#include <cmath>

#include "nergpsa/errors.hpp"

namespace nergpsa {

std::vector<double> RvtConfig::default_periods() {
  const auto grid = FrequencyGrid::per_decade(0.01, 10.0, 20.0);
  return {grid.freqs().begin(), grid.freqs().end()};
}

RvtConfig RvtConfig::with_shipped_data(const std::string& data_dir) {
  RvtConfig cfg;
  cfg.as96 = As96Coefficients::load(data_dir + "/as96_coefficients.json");
  cfg.stress_table = StressDropTable::load(data_dir + "/stress_drop_table.json");
  return cfg;
}

void RvtConfig::validate() const {
  if (!(damping > 0.0 && damping < 1.0)) throw ValidationError("config: damping must be in (0, 1)");
  if (periods.empty()) throw ValidationError("config: period grid is empty");
  for (std::size_t i = 0; i < periods.size(); ++i) {
    if (!(periods[i] >= 0.01 - 1e-12 && periods[i] <= 10.0 + 1e-12)) {
      throw ValidationError("config: periods must lie within [0.01, 10] s");
    }
    if (i > 0 && !(periods[i] > periods[i - 1])) {
      throw ValidationError("config: periods must be strictly ascending");
    }
  }
  if (duration_source == DurationSource::user && !user_d_gm) {
    throw ConfigError("duration source 'user' requires a duration value");
  }
  if (duration_source == DurationSource::as96 && !as96) {
    throw ConfigError("duration source 'as96' requires AS96 coefficients");
  }
  if (extrapolate && !(f_low_target > 0.0 && f_high_target > f_low_target)) {
    throw ConfigError("extrapolation targets must satisfy 0 < low < high");
  }
  if (bandwidth_exponent < 0.0) throw ConfigError("bandwidth exponent must be >= 0");
}

EasSpectrum prepare_spectrum(const EasSpectrum& spec, const Scenario& scn, const RvtConfig& cfg) {
  if (!cfg.extrapolate) return spec;
  EasSpectrum out = spec;
  if (out.grid().f_min() > cfg.f_low_target) {
    out = extrapolate_low(out, scn, cfg.f_low_target,
                          cfg.stress_table ? &*cfg.stress_table : nullptr);
  }
  if (out.grid().f_max() < cfg.f_high_target) {
    const double kappa = scn.kappa_s ? *scn.kappa_s : kappa_from_vs30(scn.vs30_ms);
    out = extrapolate_high(out, kappa, cfg.f_high_target);
  }
  return out;
}

DurationResult ground_motion_duration(const Scenario& scn, const RvtConfig& cfg) {
  if (cfg.duration_source == DurationSource::user) {
    if (!cfg.user_d_gm) throw ConfigError("duration source 'user' requires a duration value");
    return user_duration(*cfg.user_d_gm);
  }
  if (!cfg.as96) throw ConfigError("duration source 'as96' requires AS96 coefficients");
  return as96_dgm(scn, *cfg.as96, cfg.duration_interval);
}

PsaDiagnostics psa_prepared(const EasSpectrum& prepared, const Oscillator& osc,
                            const Scenario& scn, const DurationResult& d_gm,
                            const RvtConfig& cfg) {
  const auto response = prepared.filtered(oscillator_transfer(osc, prepared.grid()));
  const auto m = spectral_moments(response);
  const auto bw = bandwidth_delta(m, cfg.bandwidth_exponent);

  PsaDiagnostics d;
  d.period = osc.period();
  d.m0 = m.m0;
  d.m1 = m.m1;
  d.m2 = m.m2;
  d.delta = bw.delta;
  d.delta_e = bw.delta_e;
  d.f_z = zero_crossing_rate(m);
  d.d_gm = d_gm.d_gm;
  d.n_z = d.f_z * d.d_gm;
  const auto pf = expected_peak_factor(d.n_z, d.delta_e, cfg.pf);
  d.pf = pf.value;
  d.pf_error = pf.error_estimate;
  d.d_rms = rms_duration(d_gm, osc, scn, cfg.rms_model);
  d.psa = d.pf * std::sqrt(d.m0 / d.d_rms);
  return d;
}

PsaDiagnostics psa_single(const EasSpectrum& spec, const Oscillator& osc, const Scenario& scn,
                          const RvtConfig& cfg) {
  scn.validate();
  return psa_prepared(prepare_spectrum(spec, scn, cfg), osc, scn,
                      ground_motion_duration(scn, cfg), cfg);
}

PsaSpectrum psa_spectrum(const EasSpectrum& spec, const Scenario& scn, const RvtConfig& cfg) {
  cfg.validate();
  scn.validate();
  const auto prepared = prepare_spectrum(spec, scn, cfg);
  const auto d_gm = ground_motion_duration(scn, cfg);

  PsaSpectrum out;
  out.periods = cfg.periods;
  out.psa.reserve(cfg.periods.size());
  out.diagnostics.reserve(cfg.periods.size());
  for (double t : cfg.periods) {
    auto d = psa_prepared(prepared, Oscillator::from_period(t, cfg.damping), scn, d_gm, cfg);
    out.psa.push_back(d.psa);
    out.diagnostics.push_back(d);
  }
  return out;
}

}  // namespace nergpsa

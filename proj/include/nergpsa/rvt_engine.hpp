#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nergpsa/duration.hpp"
#include "nergpsa/peak_factor.hpp"
#include "nergpsa/spectra.hpp"

namespace nergpsa {

enum class DurationSource { as96, user };

struct RvtConfig {
  double damping = 0.05;
  std::vector<double> periods = default_periods();

  DurationSource duration_source = DurationSource::as96;
  std::optional<double> user_d_gm;  // s, used when duration_source == user
  std::optional<As96Coefficients> as96;
  double duration_interval = 0.85;  // D_a0.05-I

  RmsDurationModel rms_model;

  bool extrapolate = true;
  double f_low_target = 0.01;
  double f_high_target = 100.0;
  std::optional<StressDropTable> stress_table;

  double bandwidth_exponent = 0.2;
  PeakFactorOptions pf;

  // 20 log-spaced periods per decade over [0.01, 10] s.
  static std::vector<double> default_periods();
  // Defaults plus the coefficient files shipped in the data directory.
  static RvtConfig with_shipped_data(const std::string& data_dir = NERGPSA_DATA_DIR);

  void validate() const;
};

struct PsaDiagnostics {
  double period = 0.0;
  double psa = 0.0;
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double delta = 0.0;
  double delta_e = 0.0;
  double f_z = 0.0;
  double n_z = 0.0;
  double pf = 0.0;
  double pf_error = 0.0;
  double d_gm = 0.0;
  double d_rms = 0.0;
};

struct PsaSpectrum {
  std::vector<double> periods;
  std::vector<double> psa;
  std::vector<PsaDiagnostics> diagnostics;
};

// Extends the spectrum to the configured targets when enabled and needed.
EasSpectrum prepare_spectrum(const EasSpectrum& spec, const Scenario& scn, const RvtConfig& cfg);

DurationResult ground_motion_duration(const Scenario& scn, const RvtConfig& cfg);

// Core evaluation on an already prepared spectrum with a known D_gm.
PsaDiagnostics psa_prepared(const EasSpectrum& prepared, const Oscillator& osc,
                            const Scenario& scn, const DurationResult& d_gm,
                            const RvtConfig& cfg);

// psa = E[PF] sqrt(m0 / D_rms) of the oscillator-filtered spectrum.
PsaDiagnostics psa_single(const EasSpectrum& spec, const Oscillator& osc, const Scenario& scn,
                          const RvtConfig& cfg);

PsaSpectrum psa_spectrum(const EasSpectrum& spec, const Scenario& scn, const RvtConfig& cfg);

}  // namespace nergpsa

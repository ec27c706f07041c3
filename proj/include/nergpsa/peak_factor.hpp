#pragma once

#include <cstddef>

#include "nergpsa/spectra.hpp"

namespace nergpsa {

struct PeakFactorInputs {
  SpectralMoments moments;
  double d_gm = 1.0;  // s
  double b = 0.2;     // bandwidth exponent

  void validate() const;
};

// Both-direction zero-crossing rate of a stationary Gaussian process:
// f_z = (1/π) sqrt(m2/m0). Swap here to change the crossing convention.
double zero_crossing_rate(const SpectralMoments& m);

// Vanmarcke first-passage CDF of the peak factor with explicit crossing
// count N_z = f_z D_gm and effective bandwidth δ_e.
double v75_cdf(double r, double n_z, double delta_e);
double v75_cdf(double r, const PeakFactorInputs& pfi);

struct PeakFactorResult {
  double value = 0.0;
  double error_estimate = 0.0;
  double r_max = 0.0;
  double n_z = 0.0;
  double delta_e = 0.0;
};

struct PeakFactorOptions {
  double abs_tolerance = 1e-13;
  double rel_tolerance = 1e-12;
  std::size_t max_intervals = 2000;
};

// Upper truncation of the expectation integral; the survival function is
// below 1e-14 past this point.
double pf_upper_limit(double n_z);

// E[PF] = ∫_0^∞ (1 - F(r)) dr by adaptive Gauss-Kronrod on [0, r_max].
// NumericalError if the quadrature does not reach the tolerance.
PeakFactorResult expected_peak_factor(double n_z, double delta_e,
                                      const PeakFactorOptions& opts = {});
PeakFactorResult expected_peak_factor(const PeakFactorInputs& pfi,
                                      const PeakFactorOptions& opts = {});

}  // namespace nergpsa

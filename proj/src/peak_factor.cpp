#include "nergpsa/peak_factor.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nergpsa/errors.hpp"
#include "nergpsa/quadrature.hpp"

namespace nergpsa {

namespace {

const double kSqrtHalfPi = std::sqrt(std::numbers::pi / 2.0);

// (1 - exp(-a r)) / (1 - exp(-r^2/2)), series form near r = 0.
double clumping_ratio(double r, double a) {
  if (r < 1e-4) {
    const double ar = a * r;
    const double num = ar * (1.0 - ar / 2.0 + ar * ar / 6.0);
    const double den = 0.5 * r * r * (1.0 - r * r / 4.0);
    return num / den;
  }
  return -std::expm1(-a * r) / -std::expm1(-0.5 * r * r);
}

}  // namespace

void PeakFactorInputs::validate() const {
  if (!(moments.m0 > 0.0) || !(moments.m2 > 0.0)) {
    throw DegenerateSpectrumError("peak factor requires m0 > 0 and m2 > 0");
  }
  if (!(d_gm > 0.0)) throw ValidationError("peak factor requires D_gm > 0");
}

double zero_crossing_rate(const SpectralMoments& m) {
  if (!(m.m0 > 0.0)) throw DegenerateSpectrumError("zero-crossing rate requires m0 > 0");
  return std::sqrt(m.m2 / m.m0) / std::numbers::pi;
}

double v75_cdf(double r, double n_z, double delta_e) {
  if (r < 0.0) throw DomainError("peak-factor level r must be >= 0");
  if (r == 0.0) return 0.0;
  const double start_inside = -std::expm1(-0.5 * r * r);
  if (n_z == 0.0 || delta_e == 0.0) return start_inside;
  // exp(-r^2/2) * ratio stays finite; exp() of a huge negative underflows to 0.
  const double rate = n_z * std::exp(-0.5 * r * r) * clumping_ratio(r, kSqrtHalfPi * delta_e);
  return start_inside * std::exp(-rate);
}

double v75_cdf(double r, const PeakFactorInputs& pfi) {
  pfi.validate();
  const double n_z = zero_crossing_rate(pfi.moments) * pfi.d_gm;
  return v75_cdf(r, n_z, bandwidth_delta(pfi.moments, pfi.b).delta_e);
}

double pf_upper_limit(double n_z) {
  const double core = n_z > 1.0 ? std::sqrt(2.0 * std::log(n_z)) : 0.0;
  return std::max(10.0, core + 8.0);
}

PeakFactorResult expected_peak_factor(double n_z, double delta_e, const PeakFactorOptions& opts) {
  if (!(n_z >= 0.0) || !std::isfinite(n_z)) throw DomainError("N_z must be finite and >= 0");
  if (!(delta_e >= 0.0 && delta_e <= 1.0)) throw DomainError("delta_e must lie in [0, 1]");

  PeakFactorResult out;
  out.n_z = n_z;
  out.delta_e = delta_e;
  out.r_max = pf_upper_limit(n_z);

  const auto survival = [&](double r) { return 1.0 - v75_cdf(r, n_z, delta_e); };
  const auto q = integrate_adaptive(survival, 0.0, out.r_max, opts.abs_tolerance,
                                    opts.rel_tolerance, opts.max_intervals);
  out.value = q.value;
  out.error_estimate = q.error_estimate;
  if (!q.converged || !std::isfinite(q.value)) {
    std::ostringstream os;
    os.precision(6);
    os << "peak-factor quadrature did not converge (N_z = " << n_z << ", delta_e = " << delta_e
       << ", estimate = " << q.value << ", error estimate = " << q.error_estimate << ", intervals = "
       << q.intervals << ")";
    throw NumericalError(os.str());
  }
  return out;
}

PeakFactorResult expected_peak_factor(const PeakFactorInputs& pfi, const PeakFactorOptions& opts) {
  pfi.validate();
  const double n_z = zero_crossing_rate(pfi.moments) * pfi.d_gm;
  return expected_peak_factor(n_z, bandwidth_delta(pfi.moments, pfi.b).delta_e, opts);
}

}  // namespace nergpsa

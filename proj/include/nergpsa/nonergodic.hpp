#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nergpsa/rvt_engine.hpp"
#include "nergpsa/spectra.hpp"

namespace nergpsa {

// Inter-frequency correlation of the ln-EAS adjustment.
struct CorrelationModel {
  enum class Kind { exp_ln_f, identity, full };
  Kind kind = Kind::exp_ln_f;
  double length = 0.7;  // in ln-frequency units, exp_ln_f only

  static CorrelationModel exp_ln_f(double length);
  static CorrelationModel identity() { return {Kind::identity, 0.0}; }
  static CorrelationModel full() { return {Kind::full, 0.0}; }
  // {"model":"exp_ln_f","length":0.7} | {"model":"identity"} | {"model":"full"}
  static CorrelationModel from_json_text(const std::string& text);
  std::string to_json_text() const;

  double operator()(double f1, double f2) const;
};

struct NonErgodicField {
  FrequencyGrid grid;
  std::vector<double> mean_ln;
  std::vector<double> sd_ln;
  CorrelationModel correlation;

  void validate() const;
};

// Correlated Gaussian sampler for a field. The factorization is computed once;
// each realization depends only on (seed, index).
class FieldSampler {
 public:
  // Pivoted LDL^T of the correlation matrix. Pivots down to -1e-10 are
  // treated as zero; anything more negative raises NumericalError.
  explicit FieldSampler(NonErgodicField field);

  std::vector<double> sample(std::uint64_t seed, std::uint64_t index) const;
  const NonErgodicField& field() const noexcept { return field_; }

 private:
  NonErgodicField field_;
  Eigen::MatrixXd factor_;  // C = factor_ factor_^T
};

std::vector<std::vector<double>> sample_field(const NonErgodicField& field, std::size_t n,
                                              std::uint64_t seed);

// Multiplies exp(adjustment) into the ergodic spectrum. The adjustment is
// interpolated linearly in ln f and held constant beyond its grid.
EasSpectrum apply_adjustment(const EasSpectrum& eas_erg, const FrequencyGrid& field_grid,
                             std::span<const double> adjustment_ln);

// Both spectra resampled (log-log linear) onto the union of their grids
// restricted to the common band. Identical grids pass through untouched.
std::pair<EasSpectrum, EasSpectrum> align_spectra(const EasSpectrum& a, const EasSpectrum& b);

struct FnergResult {
  std::vector<double> periods;
  std::vector<double> values;  // natural-log units
  std::optional<std::size_t> realization;
};

// F_nerg(T0) = ln PSA(eas_nerg) - ln PSA(eas_erg) with one shared configuration.
FnergResult fnerg_factor(const EasSpectrum& eas_erg, const EasSpectrum& eas_nerg,
                         const Scenario& scn, const RvtConfig& cfg);

// One F_nerg per sampled field realization; the ergodic leg is computed once.
std::vector<FnergResult> fnerg_realizations(const EasSpectrum& eas_erg, const FieldSampler& sampler,
                                            std::size_t n, std::uint64_t seed,
                                            const Scenario& scn, const RvtConfig& cfg);

// Per-period magnitude-dependent aleatory model plus the smoothed constant shift.
struct AleatoryCoefficients {
  std::vector<double> periods;
  std::vector<double> phi0_m1;
  std::vector<double> phi0_m2;
  std::vector<double> tau0_m1;
  std::vector<double> tau0_m2;
  std::vector<double> dc0;

  void validate() const;
  // Linear in ln T0; DomainError outside the tabulated range.
  double dc0_at(double period) const;
};

struct AleatorySigma {
  double phi0 = 0.0;
  double tau0 = 0.0;
  double sigma0 = 0.0;
};

// Plateaus below M 5 and above M 6.5, linear in M between.
AleatorySigma aleatory_sigma(double magnitude, double period, const AleatoryCoefficients& coeffs);

// y_nerg = y_erg + F_nerg + δc0 per period.
std::vector<double> apply_backbone(std::span<const double> periods, std::span<const double> y_erg,
                                   const FnergResult& fnerg, const AleatoryCoefficients& coeffs);

// Centered moving average over log10-period with the given full window width.
std::vector<double> smooth_dc0(std::span<const double> periods, std::span<const double> dc0,
                               double window_decades = 1.0 / 3.0);

}  // namespace nergpsa

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nergpsa {

// Ascending, strictly positive frequency samples (Hz).
class FrequencyGrid {
 public:
  static constexpr std::size_t kMinSize = 8;

  FrequencyGrid() = default;
  // Throws ValidationError unless freqs is strictly ascending, positive, finite
  // and holds at least kMinSize samples.
  explicit FrequencyGrid(std::vector<double> freqs);

  // n points log-spaced over [f_lo, f_hi], endpoints included.
  static FrequencyGrid log_spaced(double f_lo, double f_hi, std::size_t n);
  // Log spacing at a fixed density; f_hi is always the last point.
  static FrequencyGrid per_decade(double f_lo, double f_hi, double points_per_decade);

  std::span<const double> freqs() const noexcept { return freqs_; }
  std::size_t size() const noexcept { return freqs_.size(); }
  double operator[](std::size_t i) const { return freqs_[i]; }
  double f_min() const { return freqs_.front(); }
  double f_max() const { return freqs_.back(); }

  bool operator==(const FrequencyGrid&) const = default;

 private:
  std::vector<double> freqs_;
};

// Sampled effective amplitude spectrum. Units are whatever the source uses
// (typically g*s); the engine is unit-agnostic.
class EasSpectrum {
 public:
  EasSpectrum() = default;
  // Throws ValidationError on length mismatch, negative or non-finite amps.
  EasSpectrum(FrequencyGrid grid, std::vector<double> amps);

  const FrequencyGrid& grid() const noexcept { return grid_; }
  std::span<const double> freqs() const noexcept { return grid_.freqs(); }
  std::span<const double> amps() const noexcept { return amps_; }
  std::size_t size() const noexcept { return amps_.size(); }

  EasSpectrum scaled(double factor) const;
  // Pointwise product with a gain vector of matching length.
  EasSpectrum filtered(std::span<const double> gain) const;
  // Log-log linear interpolation; zero-amplitude segments fall back to linear.
  // Outside the grid returns 0.
  double interpolate(double f) const;

 private:
  FrequencyGrid grid_;
  std::vector<double> amps_;
};

struct SpectralMoments {
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
};

struct Bandwidth {
  double delta = 0.0;
  double delta_e = 0.0;
};

struct Oscillator {
  double f0 = 1.0;     // Hz
  double zeta = 0.05;  // fraction of critical

  Oscillator() = default;
  Oscillator(double natural_frequency, double damping);
  static Oscillator from_period(double period_s, double damping);
  double period() const { return 1.0 / f0; }
};

// Earthquake / site descriptors.
struct Scenario {
  double magnitude = 6.0;
  double r_rup_km = 10.0;
  double vs30_ms = 760.0;
  int site_class = 0;                     // S in {0, 1}
  std::optional<double> stress_drop_bar;  // user Δσ
  double beta_kms = 3.2;                  // source shear-wave velocity
  std::optional<double> kappa_s;          // overrides the κ–V_S30 relation
  std::optional<std::pair<double, double>> event_coords;
  std::optional<std::pair<double, double>> site_coords;

  // Throws ValidationError naming the first violated invariant.
  void validate() const;
};

// Magnitude -> stress drop lookup standing in for an empirical relation.
// Linear interpolation in M of log10(Δσ); clamped to the end values.
class StressDropTable {
 public:
  StressDropTable() = default;
  StressDropTable(std::vector<double> magnitudes, std::vector<double> stress_drop_bar,
                  std::string name = "table");
  static StressDropTable load(const std::string& path);

  double operator()(double magnitude) const;
  const std::string& name() const noexcept { return name_; }
  bool empty() const noexcept { return magnitudes_.empty(); }

 private:
  std::vector<double> magnitudes_;
  std::vector<double> log10_stress_;
  std::string name_;
};

// |IR(f)| = f0^2 / sqrt((f^2 - f0^2)^2 + (2 zeta f0 f)^2), pseudo-acceleration gain.
double oscillator_transfer(const Oscillator& osc, double f);
std::vector<double> oscillator_transfer(const Oscillator& osc, const FrequencyGrid& grid);

// Trapezoidal integration on the native grid; works unchanged on
// log-spaced or irregular grids.
double trapezoid(std::span<const double> x, std::span<const double> y);

// m_k = 2 ∫ (2πf)^k X(f)^2 df. Throws DegenerateSpectrumError when m0 == 0.
SpectralMoments spectral_moments(const EasSpectrum& spec);

// delta = sqrt(1 - m1^2/(m0 m2)), delta_e = delta^(1+b).
Bandwidth bandwidth_delta(const SpectralMoments& m, double b = 0.2);

// Brune corner frequency (Hz): 4.9e6 β (Δσ / M0)^(1/3), M0 = 10^(1.5M + 16.05) dyne-cm.
double corner_frequency(double magnitude, double stress_drop_bar, double beta_kms);
// Uses the scenario Δσ if present, otherwise the table; ConfigError if neither.
double corner_frequency(const Scenario& scn, const StressDropTable* stress_table = nullptr);

// ln κ = -0.4 ln(V_S30/760) - 3.5
double kappa_from_vs30(double vs30_ms);

double omega_square_shape(double f, double fc);

// Extends the spectrum below f_min with A_fmin Ω(f); A_fmin is the mean of
// EAS/Ω over [f_min, 1.05 f_min]. Native samples are copied untouched.
EasSpectrum extrapolate_low(const EasSpectrum& spec, double fc, double f_target);
EasSpectrum extrapolate_low(const EasSpectrum& spec, const Scenario& scn, double f_target,
                            const StressDropTable* stress_table = nullptr);

// Extends the spectrum above f_max with A_fmax exp(-π κ f); A_fmax is the
// mean of EAS/D over [0.95 f_max, f_max].
EasSpectrum extrapolate_high(const EasSpectrum& spec, double kappa, double f_target);

}  // namespace nergpsa

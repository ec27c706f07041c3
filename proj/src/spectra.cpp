#include "nergpsa/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "nergpsa/errors.hpp"

namespace nergpsa {

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(9);
  os << v;
  return os.str();
}

double log10_ppd(double f_lo, double f_hi) { return 1.0 / std::log10(f_hi / f_lo); }

// Log-spaced points starting at f_from and stepping towards f_edge (excluded).
std::vector<double> extension_points(double f_from, double f_edge, double ppd) {
  const double decades = std::abs(std::log10(f_edge / f_from));
  const auto n = static_cast<std::size_t>(std::ceil(decades * ppd - 1e-9));
  std::vector<double> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    pts.push_back(f_from * std::pow(f_edge / f_from, t));
  }
  return pts;
}

}  // namespace

// ---------------------------------------------------------------------------
// FrequencyGrid

FrequencyGrid::FrequencyGrid(std::vector<double> freqs) : freqs_(std::move(freqs)) {
  if (freqs_.size() < kMinSize) {
    throw ValidationError("frequency grid needs at least " + std::to_string(kMinSize) +
                          " samples, got " + std::to_string(freqs_.size()));
  }
  for (std::size_t i = 0; i < freqs_.size(); ++i) {
    if (!std::isfinite(freqs_[i]) || freqs_[i] <= 0.0) {
      throw ValidationError("frequencies must be finite and > 0 (index " + std::to_string(i) +
                            ")");
    }
    if (i > 0 && !(freqs_[i] > freqs_[i - 1])) {
      throw ValidationError("frequencies must be strictly ascending (index " +
                            std::to_string(i) + ")");
    }
  }
}

FrequencyGrid FrequencyGrid::log_spaced(double f_lo, double f_hi, std::size_t n) {
  if (!(f_lo > 0.0) || !(f_hi > f_lo) || n < 2) {
    throw ValidationError("log_spaced: need 0 < f_lo < f_hi and n >= 2");
  }
  std::vector<double> f(n);
  const double a = std::log(f_lo);
  const double b = std::log(f_hi);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  f.front() = f_lo;
  f.back() = f_hi;
  return FrequencyGrid(std::move(f));
}

FrequencyGrid FrequencyGrid::per_decade(double f_lo, double f_hi, double points_per_decade) {
  if (!(points_per_decade > 0.0)) throw ValidationError("points per decade must be > 0");
  const double decades = std::log10(f_hi / f_lo);
  const auto n = static_cast<std::size_t>(std::ceil(decades * points_per_decade - 1e-9)) + 1;
  return log_spaced(f_lo, f_hi, std::max<std::size_t>(n, 2));
}

// ---------------------------------------------------------------------------
// EasSpectrum

EasSpectrum::EasSpectrum(FrequencyGrid grid, std::vector<double> amps)
    : grid_(std::move(grid)), amps_(std::move(amps)) {
  if (amps_.size() != grid_.size()) {
    throw ValidationError("amplitude count " + std::to_string(amps_.size()) +
                          " does not match grid size " + std::to_string(grid_.size()));
  }
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if (!std::isfinite(amps_[i])) {
      throw ValidationError("amplitudes must be finite (index " + std::to_string(i) + ")");
    }
    if (amps_[i] < 0.0) {
      throw ValidationError("amplitudes must be >= 0 (index " + std::to_string(i) + ")");
    }
  }
}

EasSpectrum EasSpectrum::scaled(double factor) const {
  std::vector<double> a(amps_);
  for (auto& v : a) v *= factor;
  return EasSpectrum(grid_, std::move(a));
}

EasSpectrum EasSpectrum::filtered(std::span<const double> gain) const {
  if (gain.size() != amps_.size()) throw ValidationError("filter length mismatch");
  std::vector<double> a(amps_.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = amps_[i] * gain[i];
  return EasSpectrum(grid_, std::move(a));
}

double EasSpectrum::interpolate(double f) const {
  const auto fs = grid_.freqs();
  if (f < fs.front() || f > fs.back()) return 0.0;
  auto it = std::lower_bound(fs.begin(), fs.end(), f);
  auto hi = static_cast<std::size_t>(it - fs.begin());
  if (fs[hi] == f) return amps_[hi];
  const std::size_t lo = hi - 1;
  const double a0 = amps_[lo];
  const double a1 = amps_[hi];
  if (a0 > 0.0 && a1 > 0.0) {
    const double t = std::log(f / fs[lo]) / std::log(fs[hi] / fs[lo]);
    return std::exp(std::log(a0) + t * (std::log(a1) - std::log(a0)));
  }
  const double t = (f - fs[lo]) / (fs[hi] - fs[lo]);
  return a0 + t * (a1 - a0);
}

// ---------------------------------------------------------------------------
// Oscillator / Scenario

Oscillator::Oscillator(double natural_frequency, double damping)
    : f0(natural_frequency), zeta(damping) {
  if (!(f0 > 0.0) || !std::isfinite(f0)) throw ValidationError("oscillator f0 must be > 0");
  if (!(zeta > 0.0 && zeta < 1.0)) throw ValidationError("oscillator damping must be in (0, 1)");
}

Oscillator Oscillator::from_period(double period_s, double damping) {
  if (!(period_s > 0.0)) throw ValidationError("oscillator period must be > 0");
  return Oscillator(1.0 / period_s, damping);
}

void Scenario::validate() const {
  if (!std::isfinite(magnitude)) throw ValidationError("scenario: magnitude must be finite");
  if (!(r_rup_km >= 0.0)) throw ValidationError("scenario: r_rup_km must be >= 0");
  if (!(vs30_ms > 0.0)) throw ValidationError("scenario: vs30_ms must be > 0");
  if (!(beta_kms > 0.0)) throw ValidationError("scenario: beta_kms must be > 0");
  if (site_class != 0 && site_class != 1) {
    throw ValidationError("scenario: site_class must be 0 or 1");
  }
  if (stress_drop_bar && !(*stress_drop_bar > 0.0)) {
    throw ValidationError("scenario: stress_drop_bar must be > 0 when present");
  }
  if (kappa_s && !(*kappa_s > 0.0)) throw ValidationError("scenario: kappa_s must be > 0");
}

// ---------------------------------------------------------------------------
// StressDropTable

StressDropTable::StressDropTable(std::vector<double> magnitudes,
                                 std::vector<double> stress_drop_bar, std::string name)
    : magnitudes_(std::move(magnitudes)), name_(std::move(name)) {
  if (magnitudes_.empty() || magnitudes_.size() != stress_drop_bar.size()) {
    throw ValidationError("stress-drop table: magnitude and stress-drop arrays must be "
                          "nonempty and of equal length");
  }
  for (std::size_t i = 0; i < magnitudes_.size(); ++i) {
    if (i > 0 && !(magnitudes_[i] > magnitudes_[i - 1])) {
      throw ValidationError("stress-drop table: magnitudes must be strictly ascending");
    }
    if (!(stress_drop_bar[i] > 0.0)) {
      throw ValidationError("stress-drop table: stress drops must be > 0");
    }
    log10_stress_.push_back(std::log10(stress_drop_bar[i]));
  }
}

StressDropTable StressDropTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stress-drop table '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
    return StressDropTable(j.at("magnitude").get<std::vector<double>>(),
                           j.at("stress_drop_bar").get<std::vector<double>>(),
                           j.value("model", std::string("table")) + "@" +
                               j.value("version", std::string("?")));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("stress-drop table '" + path + "': " + e.what());
  }
}

double StressDropTable::operator()(double magnitude) const {
  if (empty()) throw ConfigError("stress-drop table is empty");
  if (magnitude <= magnitudes_.front()) return std::pow(10.0, log10_stress_.front());
  if (magnitude >= magnitudes_.back()) return std::pow(10.0, log10_stress_.back());
  auto it = std::upper_bound(magnitudes_.begin(), magnitudes_.end(), magnitude);
  const auto hi = static_cast<std::size_t>(it - magnitudes_.begin());
  const auto lo = hi - 1;
  const double t = (magnitude - magnitudes_[lo]) / (magnitudes_[hi] - magnitudes_[lo]);
  return std::pow(10.0, log10_stress_[lo] + t * (log10_stress_[hi] - log10_stress_[lo]));
}

// ---------------------------------------------------------------------------
// Transfer, moments, bandwidth

double oscillator_transfer(const Oscillator& osc, double f) {
  const double f0sq = osc.f0 * osc.f0;
  const double re = f * f - f0sq;
  const double im = 2.0 * osc.zeta * osc.f0 * f;
  return f0sq / std::hypot(re, im);
}

std::vector<double> oscillator_transfer(const Oscillator& osc, const FrequencyGrid& grid) {
  std::vector<double> h(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) h[i] = oscillator_transfer(osc, grid[i]);
  return h;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

SpectralMoments spectral_moments(const EasSpectrum& spec) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const auto f = spec.freqs();
  const auto a = spec.amps();
  std::vector<double> y0(f.size()), y1(f.size()), y2(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double p = a[i] * a[i];
    const double w = two_pi * f[i];
    y0[i] = p;
    y1[i] = w * p;
    y2[i] = w * w * p;
  }
  SpectralMoments m{2.0 * trapezoid(f, y0), 2.0 * trapezoid(f, y1), 2.0 * trapezoid(f, y2)};
  if (!(m.m0 > 0.0)) throw DegenerateSpectrumError("all-zero spectrum (m0 = 0)");
  return m;
}

Bandwidth bandwidth_delta(const SpectralMoments& m, double b) {
  if (!(m.m0 > 0.0) || !(m.m2 > 0.0)) {
    throw DegenerateSpectrumError("bandwidth requires m0 > 0 and m2 > 0");
  }
  if (b < 0.0) throw ValidationError("bandwidth exponent b must be >= 0");
  const double ratio = m.m1 * m.m1 / (m.m0 * m.m2);
  // Cauchy-Schwarz guarantees ratio <= 1 up to rounding.
  if (ratio > 1.0 + 1e-10) {
    throw NumericalError("spectral moments violate m1^2 <= m0 m2 (ratio " + fmt_double(ratio) +
                         ")");
  }
  const double delta = std::sqrt(std::max(0.0, 1.0 - ratio));
  return {delta, std::pow(delta, 1.0 + b)};
}

// ---------------------------------------------------------------------------
// Source and site parameters

double corner_frequency(double magnitude, double stress_drop_bar, double beta_kms) {
  if (!(stress_drop_bar > 0.0)) throw ValidationError("stress drop must be > 0");
  if (!(beta_kms > 0.0)) throw ValidationError("beta must be > 0");
  const double log10_m0 = 1.5 * magnitude + 16.05;
  return 4.9e6 * beta_kms * std::cbrt(stress_drop_bar * std::pow(10.0, -log10_m0));
}

double corner_frequency(const Scenario& scn, const StressDropTable* stress_table) {
  double ds = 0.0;
  if (scn.stress_drop_bar) {
    ds = *scn.stress_drop_bar;
  } else if (stress_table != nullptr && !stress_table->empty()) {
    ds = (*stress_table)(scn.magnitude);
  } else {
    throw ConfigError("corner frequency: no stress drop given and no stress-drop relation "
                      "configured");
  }
  return corner_frequency(scn.magnitude, ds, scn.beta_kms);
}

double kappa_from_vs30(double vs30_ms) {
  if (!(vs30_ms > 0.0)) throw ValidationError("vs30 must be > 0");
  return std::exp(-0.4 * std::log(vs30_ms / 760.0) - 3.5);
}

double omega_square_shape(double f, double fc) { return f * f / (1.0 + f * f / (fc * fc)); }

// ---------------------------------------------------------------------------
// Extrapolation

EasSpectrum extrapolate_low(const EasSpectrum& spec, double fc, double f_target) {
  const auto f = spec.freqs();
  const auto a = spec.amps();
  const double f_min = f.front();
  if (!(f_target > 0.0) || !(f_target < f_min)) {
    throw DomainError("low-frequency target must satisfy 0 < f_target < f_min");
  }
  if (!(fc > 0.0)) throw ValidationError("corner frequency must be > 0");

  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < f.size() && f[i] <= 1.05 * f_min; ++i) {
    sum += a[i] / omega_square_shape(f[i], fc);
    ++n;
  }
  if (n < 2) {
    throw AnchorError("low-frequency bin [f_min, 1.05 f_min] holds " + std::to_string(n) +
                      " sample(s); at least 2 required");
  }
  const double anchor = sum / static_cast<double>(n);

  const auto ext = extension_points(f_target, f_min, log10_ppd(f[0], f[1]));
  std::vector<double> freqs;
  std::vector<double> amps;
  freqs.reserve(ext.size() + f.size());
  amps.reserve(ext.size() + f.size());
  for (double fe : ext) {
    freqs.push_back(fe);
    amps.push_back(anchor * omega_square_shape(fe, fc));
  }
  freqs.insert(freqs.end(), f.begin(), f.end());
  amps.insert(amps.end(), a.begin(), a.end());
  return EasSpectrum(FrequencyGrid(std::move(freqs)), std::move(amps));
}

EasSpectrum extrapolate_low(const EasSpectrum& spec, const Scenario& scn, double f_target,
                            const StressDropTable* stress_table) {
  return extrapolate_low(spec, corner_frequency(scn, stress_table), f_target);
}

EasSpectrum extrapolate_high(const EasSpectrum& spec, double kappa, double f_target) {
  const auto f = spec.freqs();
  const auto a = spec.amps();
  const double f_max = f.back();
  if (!(f_target > f_max)) throw DomainError("high-frequency target must exceed f_max");
  if (!(kappa > 0.0)) throw ValidationError("kappa must be > 0");

  const auto decay = [kappa](double fr) { return std::exp(-std::numbers::pi * kappa * fr); };
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = f.size(); i-- > 0 && f[i] >= 0.95 * f_max;) {
    sum += a[i] / decay(f[i]);
    ++n;
  }
  if (n < 2) {
    throw AnchorError("high-frequency bin [0.95 f_max, f_max] holds " + std::to_string(n) +
                      " sample(s); at least 2 required");
  }
  const double anchor = sum / static_cast<double>(n);

  const std::size_t last = f.size() - 1;
  auto ext = extension_points(f_target, f_max, log10_ppd(f[last - 1], f[last]));
  std::reverse(ext.begin(), ext.end());
  std::vector<double> freqs(f.begin(), f.end());
  std::vector<double> amps(a.begin(), a.end());
  for (double fe : ext) {
    freqs.push_back(fe);
    amps.push_back(anchor * decay(fe));
  }
  return EasSpectrum(FrequencyGrid(std::move(freqs)), std::move(amps));
}

}  // namespace nergpsa

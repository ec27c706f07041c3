#include "nergpsa/nonergodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "json.hpp"
#include "nergpsa/errors.hpp"

namespace nergpsa {

namespace {

constexpr double kPivotFloor = -1e-10;

// Linear interpolation in ln(x); ends held constant.
double interp_ln(std::span<const double> xs, std::span<const double> ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto hi = static_cast<std::size_t>(it - xs.begin());
  const auto lo = hi - 1;
  const double t = std::log(x / xs[lo]) / std::log(xs[hi] / xs[lo]);
  return ys[lo] + t * (ys[hi] - ys[lo]);
}

bool same_period(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(a, b); }

}  // namespace

// ---------------------------------------------------------------------------
// Correlation

CorrelationModel CorrelationModel::exp_ln_f(double length) {
  if (!(length > 0.0)) throw ValidationError("correlation length must be > 0");
  return {Kind::exp_ln_f, length};
}

CorrelationModel CorrelationModel::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("correlation config: ") + e.what());
  }
  const auto model = j.value("model", std::string());
  if (model == "exp_ln_f") {
    if (!j.contains("length") || !j["length"].is_number()) {
      throw ValidationError("correlation config: exp_ln_f requires a numeric 'length'");
    }
    return exp_ln_f(j["length"].get<double>());
  }
  if (model == "identity") return identity();
  if (model == "full") return full();
  throw ValidationError("correlation config: unknown model '" + model +
                        "' (expected exp_ln_f, identity or full)");
}

std::string CorrelationModel::to_json_text() const {
  nlohmann::json j;
  switch (kind) {
    case Kind::exp_ln_f:
      j["model"] = "exp_ln_f";
      j["length"] = length;
      break;
    case Kind::identity:
      j["model"] = "identity";
      break;
    case Kind::full:
      j["model"] = "full";
      break;
  }
  return j.dump();
}

double CorrelationModel::operator()(double f1, double f2) const {
  switch (kind) {
    case Kind::identity:
      return f1 == f2 ? 1.0 : 0.0;
    case Kind::full:
      return 1.0;
    case Kind::exp_ln_f:
      break;
  }
  return std::exp(-std::abs(std::log(f1) - std::log(f2)) / length);
}

void NonErgodicField::validate() const {
  if (mean_ln.size() != grid.size() || sd_ln.size() != grid.size()) {
    throw ValidationError("non-ergodic field: mean_ln and sd_ln must match the grid length");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(mean_ln[i]) || !std::isfinite(sd_ln[i])) {
      throw ValidationError("non-ergodic field: values must be finite (index " +
                            std::to_string(i) + ")");
    }
    if (sd_ln[i] < 0.0) {
      throw ValidationError("non-ergodic field: sd_ln must be >= 0 (index " + std::to_string(i) +
                            ")");
    }
  }
}

// ---------------------------------------------------------------------------
// Sampling

FieldSampler::FieldSampler(NonErgodicField field) : field_(std::move(field)) {
  field_.validate();
  const auto n = static_cast<Eigen::Index>(field_.grid.size());
  Eigen::MatrixXd corr(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      corr(i, j) = field_.correlation(field_.grid[static_cast<std::size_t>(i)],
                                      field_.grid[static_cast<std::size_t>(j)]);
    }
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(corr);
  if (ldlt.info() != Eigen::Success) {
    throw NumericalError("correlation matrix factorization failed");
  }
  Eigen::VectorXd d = ldlt.vectorD();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d(i) < kPivotFloor) {
      throw NumericalError("correlation matrix is not positive semidefinite (pivot " +
                           std::to_string(d(i)) + ")");
    }
    d(i) = std::sqrt(std::max(d(i), 0.0));
  }
  const Eigen::MatrixXd l = ldlt.matrixL();
  Eigen::MatrixXd ld = l * d.asDiagonal();
  factor_ = ldlt.transpositionsP().transpose() * ld;
}

std::vector<double> FieldSampler::sample(std::uint64_t seed, std::uint64_t index) const {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = factor_.rows();
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
  const Eigen::VectorXd u = factor_ * z;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = field_.mean_ln[k] + field_.sd_ln[k] * u(i);
  }
  return out;
}

std::vector<std::vector<double>> sample_field(const NonErgodicField& field, std::size_t n,
                                              std::uint64_t seed) {
  const FieldSampler sampler(field);
  std::vector<std::vector<double>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sampler.sample(seed, i));
  return out;
}

EasSpectrum apply_adjustment(const EasSpectrum& eas_erg, const FrequencyGrid& field_grid,
                             std::span<const double> adjustment_ln) {
  if (adjustment_ln.size() != field_grid.size()) {
    throw ValidationError("adjustment length does not match the field grid");
  }
  const auto f = eas_erg.freqs();
  const auto a = eas_erg.amps();
  std::vector<double> amps(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    amps[i] = a[i] * std::exp(interp_ln(field_grid.freqs(), adjustment_ln, f[i]));
  }
  return EasSpectrum(eas_erg.grid(), std::move(amps));
}

std::pair<EasSpectrum, EasSpectrum> align_spectra(const EasSpectrum& a, const EasSpectrum& b) {
  if (a.grid() == b.grid()) return {a, b};
  const double lo = std::max(a.grid().f_min(), b.grid().f_min());
  const double hi = std::min(a.grid().f_max(), b.grid().f_max());
  if (!(hi > lo)) throw ValidationError("spectra have no common frequency band");
  std::set<double> pts;
  for (double f : a.freqs()) {
    if (f >= lo && f <= hi) pts.insert(f);
  }
  for (double f : b.freqs()) {
    if (f >= lo && f <= hi) pts.insert(f);
  }
  std::vector<double> freqs(pts.begin(), pts.end());
  std::vector<double> amps_a(freqs.size());
  std::vector<double> amps_b(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    amps_a[i] = a.interpolate(freqs[i]);
    amps_b[i] = b.interpolate(freqs[i]);
  }
  FrequencyGrid grid(std::move(freqs));
  return {EasSpectrum(grid, std::move(amps_a)), EasSpectrum(grid, std::move(amps_b))};
}

// ---------------------------------------------------------------------------
// Factors

namespace {

PsaSpectrum run_leg(const EasSpectrum& eas, const Scenario& scn, const RvtConfig& cfg,
                    const char* leg) {
  try {
    return psa_spectrum(eas, scn, cfg);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(leg) + " leg: " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(leg) + " leg: " + e.what());
  }
}

FnergResult difference(const PsaSpectrum& erg, const PsaSpectrum& nerg) {
  FnergResult out;
  out.periods = erg.periods;
  out.values.resize(erg.psa.size());
  for (std::size_t i = 0; i < erg.psa.size(); ++i) {
    out.values[i] = std::log(nerg.psa[i]) - std::log(erg.psa[i]);
    if (!std::isfinite(out.values[i])) {
      throw NumericalError("F_nerg is not finite at T0 = " + std::to_string(out.periods[i]));
    }
  }
  return out;
}

}  // namespace

FnergResult fnerg_factor(const EasSpectrum& eas_erg, const EasSpectrum& eas_nerg,
                         const Scenario& scn, const RvtConfig& cfg) {
  const auto [erg, nerg] = align_spectra(eas_erg, eas_nerg);
  return difference(run_leg(erg, scn, cfg, "ergodic"), run_leg(nerg, scn, cfg, "non-ergodic"));
}

std::vector<FnergResult> fnerg_realizations(const EasSpectrum& eas_erg, const FieldSampler& sampler,
                                            std::size_t n, std::uint64_t seed,
                                            const Scenario& scn, const RvtConfig& cfg) {
  const auto erg = run_leg(eas_erg, scn, cfg, "ergodic");
  std::vector<FnergResult> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto adj = sampler.sample(seed, i);
    const auto nerg_eas = apply_adjustment(eas_erg, sampler.field().grid, adj);
    auto r = difference(erg, run_leg(nerg_eas, scn, cfg, "non-ergodic"));
    r.realization = i;
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Aleatory model

void AleatoryCoefficients::validate() const {
  const std::size_t n = periods.size();
  if (n == 0) throw ValidationError("aleatory coefficients: table is empty");
  if (phi0_m1.size() != n || phi0_m2.size() != n || tau0_m1.size() != n || tau0_m2.size() != n ||
      dc0.size() != n) {
    throw ValidationError("aleatory coefficients: column lengths differ");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(periods[i] > 0.0) || (i > 0 && !(periods[i] > periods[i - 1]))) {
      throw ValidationError("aleatory coefficients: periods must be positive and ascending");
    }
    if (!(phi0_m1[i] > 0.0 && phi0_m2[i] > 0.0 && tau0_m1[i] > 0.0 && tau0_m2[i] > 0.0)) {
      throw ValidationError("aleatory coefficients: standard deviations must be > 0 (row " +
                            std::to_string(i + 1) + ")");
    }
    if (!std::isfinite(dc0[i])) throw ValidationError("aleatory coefficients: dc0 must be finite");
  }
}

namespace {

double table_value(const AleatoryCoefficients& c, const std::vector<double>& col, double period) {
  const double lo = c.periods.front();
  const double hi = c.periods.back();
  if (!(period >= lo * (1 - 1e-12) && period <= hi * (1 + 1e-12))) {
    throw DomainError("period " + std::to_string(period) + " s outside the aleatory table [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return interp_ln(c.periods, col, period);
}

double magnitude_ramp(double magnitude, double small_m, double large_m) {
  if (magnitude <= 5.0) return small_m;
  if (magnitude >= 6.5) return large_m;
  return small_m + (large_m - small_m) * (magnitude - 5.0) / 1.5;
}

}  // namespace

double AleatoryCoefficients::dc0_at(double period) const { return table_value(*this, dc0, period); }

AleatorySigma aleatory_sigma(double magnitude, double period, const AleatoryCoefficients& coeffs) {
  const double phi_m1 = table_value(coeffs, coeffs.phi0_m1, period);
  const double phi_m2 = table_value(coeffs, coeffs.phi0_m2, period);
  const double tau_m1 = table_value(coeffs, coeffs.tau0_m1, period);
  const double tau_m2 = table_value(coeffs, coeffs.tau0_m2, period);
  AleatorySigma s;
  s.phi0 = magnitude_ramp(magnitude, phi_m1, phi_m2);
  s.tau0 = magnitude_ramp(magnitude, tau_m1, tau_m2);
  s.sigma0 = std::sqrt(s.phi0 * s.phi0 + s.tau0 * s.tau0);
  return s;
}

std::vector<double> apply_backbone(std::span<const double> periods, std::span<const double> y_erg,
                                   const FnergResult& fnerg, const AleatoryCoefficients& coeffs) {
  if (periods.size() != y_erg.size() || periods.size() != fnerg.periods.size()) {
    throw ValidationError("alignment error: backbone and F_nerg period grids differ in length");
  }
  std::vector<double> out(periods.size());
  for (std::size_t i = 0; i < periods.size(); ++i) {
    if (!same_period(periods[i], fnerg.periods[i])) {
      throw ValidationError("alignment error: period " + std::to_string(periods[i]) +
                            " s does not match F_nerg period " +
                            std::to_string(fnerg.periods[i]) + " s");
    }
    out[i] = y_erg[i] + fnerg.values[i] + coeffs.dc0_at(periods[i]);
  }
  return out;
}

std::vector<double> smooth_dc0(std::span<const double> periods, std::span<const double> dc0,
                               double window_decades) {
  if (periods.size() != dc0.size()) throw ValidationError("smooth_dc0: length mismatch");
  const double half = 0.5 * window_decades;
  std::vector<double> out(dc0.size());
  for (std::size_t i = 0; i < periods.size(); ++i) {
    const double center = std::log10(periods[i]);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t j = 0; j < periods.size(); ++j) {
      if (std::abs(std::log10(periods[j]) - center) <= half + 1e-12) {
        sum += dc0[j];
        ++n;
      }
    }
    out[i] = sum / static_cast<double>(n);
  }
  return out;
}

}  // namespace nergpsa

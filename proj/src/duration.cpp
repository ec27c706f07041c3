#include "nergpsa/duration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "nergpsa/errors.hpp"

namespace nergpsa {

namespace {

nlohmann::json read_json(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw IoError(std::string("cannot open ") + what + " '" + path + "'");
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string(what) + " '" + path + "': " + e.what());
  }
}

std::string interval_label(double interval) {
  std::ostringstream os;
  os << "a0.05-" << interval;
  return os.str();
}

// Index of the lower bracket and interpolation weight, clamped at the ends.
std::pair<std::size_t, double> bracket(const std::vector<double>& xs, double x) {
  if (xs.size() == 1 || x <= xs.front()) return {0, 0.0};
  if (x >= xs.back()) return {xs.size() - 2, 1.0};
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto hi = static_cast<std::size_t>(it - xs.begin());
  return {hi - 1, (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1])};
}

}  // namespace

// ---------------------------------------------------------------------------
// AS96

void As96Coefficients::validate() const {
  if (c1 < 0.0 || c2 < 0.0 || r_c < 0.0) {
    throw ValidationError("AS96 coefficients: c1, c2 and R_c must be >= 0");
  }
  if (!(beta_kms > 0.0)) throw ValidationError("AS96 coefficients: beta must be > 0");
  if (!(stress_drop_bar > 0.0)) throw ValidationError("AS96 coefficients: stress drop must be > 0");
  if (stress_b1.has_value() != stress_b2.has_value()) {
    throw ValidationError("AS96 coefficients: stress-drop b1 and b2 must be given together");
  }
}

double As96Coefficients::stress_drop(double magnitude) const {
  if (stress_b1 && stress_b2) return std::exp(*stress_b1 + *stress_b2 * (magnitude - stress_m_ref));
  return stress_drop_bar;
}

As96Coefficients As96Coefficients::load(const std::string& path) {
  const auto j = read_json(path, "AS96 coefficient file");
  As96Coefficients c;
  try {
    c.model = j.at("model").get<std::string>();
    c.version = j.at("version").get<std::string>();
    const auto& d = j.at("d575");
    c.c1 = d.at("c1").get<double>();
    c.c2 = d.at("c2").get<double>();
    c.r_c = d.at("r_c_km").get<double>();
    c.beta_kms = d.value("beta_kms", 3.2);
    c.stress_drop_bar = d.value("stress_drop_bar", 100.0);
    if (d.contains("stress_drop_scaling")) {
      const auto& s = d.at("stress_drop_scaling");
      c.stress_b1 = s.at("b1").get<double>();
      c.stress_b2 = s.at("b2").get<double>();
      c.stress_m_ref = s.value("m_ref", 6.0);
    }
    const auto& a = j.at("interval_conversion");
    c.a1 = a.at("a1").get<double>();
    c.a2 = a.at("a2").get<double>();
    c.a3 = a.at("a3").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("AS96 coefficient file '" + path + "': " + e.what());
  }
  c.validate();
  return c;
}

DurationResult user_duration(double seconds, std::string interval) {
  if (!(seconds > 0.0) || !std::isfinite(seconds)) {
    throw ValidationError("user duration must be finite and > 0");
  }
  return {seconds, std::move(interval), "user"};
}

DurationResult as96_d575(const Scenario& scn, const As96Coefficients& coeffs) {
  scn.validate();
  const double fc =
      corner_frequency(scn.magnitude, coeffs.stress_drop(scn.magnitude), coeffs.beta_kms);
  double d = 1.0 / fc + coeffs.c2 * scn.site_class;
  if (scn.r_rup_km >= coeffs.r_c) d += coeffs.c1 * (scn.r_rup_km - coeffs.r_c);
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw DomainError("AS96 duration is not positive for this scenario");
  }
  return {d, "a0.05-0.75", coeffs.model + "@" + coeffs.version};
}

DurationResult as96_interval(const DurationResult& d575, double interval,
                             const As96Coefficients& coeffs) {
  if (!(interval > 0.05 && interval < 1.0)) {
    throw DomainError("significant-duration interval must lie in (0.05, 1)");
  }
  const double l = std::log((interval - 0.05) / (1.0 - interval));
  const double ratio = std::exp(coeffs.a1 + coeffs.a2 * l + coeffs.a3 * l * l);
  return {d575.d_gm * ratio, interval_label(interval), d575.provenance};
}

DurationResult as96_dgm(const Scenario& scn, const As96Coefficients& coeffs, double interval) {
  return as96_interval(as96_d575(scn, coeffs), interval, coeffs);
}

// ---------------------------------------------------------------------------
// BT15-style table

Bt15Table::Bt15Table(std::vector<double> magnitudes, std::vector<double> distances_km,
                     std::vector<std::vector<double>> coeffs, std::string name)
    : magnitudes_(std::move(magnitudes)),
      distances_(std::move(distances_km)),
      coeffs_(std::move(coeffs)),
      name_(std::move(name)) {
  if (magnitudes_.empty() || distances_.empty()) {
    throw ValidationError("BT15 table: magnitude and distance axes must be nonempty");
  }
  if (!std::is_sorted(magnitudes_.begin(), magnitudes_.end()) ||
      !std::is_sorted(distances_.begin(), distances_.end())) {
    throw ValidationError("BT15 table: axes must be ascending");
  }
  if (distances_.front() <= 0.0) throw ValidationError("BT15 table: distances must be > 0");
  if (coeffs_.size() != magnitudes_.size() * distances_.size()) {
    throw ValidationError("BT15 table: coefficient count does not match the (M, R) grid");
  }
  for (const auto& c : coeffs_) {
    if (c.size() != 7) throw ValidationError("BT15 table: each node needs 7 coefficients");
  }
  for (auto& r : distances_) r = std::log(r);
}

Bt15Table Bt15Table::load(const std::string& path) {
  const auto j = read_json(path, "BT15 coefficient file");
  try {
    auto mags = j.at("magnitude").get<std::vector<double>>();
    auto dists = j.at("distance_km").get<std::vector<double>>();
    const auto grid = j.at("coefficients").get<std::vector<std::vector<std::vector<double>>>>();
    std::vector<std::vector<double>> flat;
    if (grid.size() != mags.size()) {
      throw ValidationError("BT15 coefficient file '" + path + "': one row per magnitude required");
    }
    for (const auto& row : grid) {
      if (row.size() != dists.size()) {
        throw ValidationError("BT15 coefficient file '" + path +
                              "': one entry per distance required");
      }
      flat.insert(flat.end(), row.begin(), row.end());
    }
    return Bt15Table(std::move(mags), std::move(dists), std::move(flat),
                     j.value("model", std::string("BT15")) + "@" +
                         j.value("version", std::string("?")));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("BT15 coefficient file '" + path + "': " + e.what());
  }
}

double Bt15Table::ratio(double magnitude, double r_rup_km, double eta, double zeta) const {
  if (magnitude < 4.0 || magnitude < magnitudes_.front()) {
    throw DomainError("BT15 D_rms model is not applicable below M " +
                      std::to_string(std::max(4.0, magnitudes_.front())));
  }
  const auto [im, tm] = bracket(magnitudes_, magnitude);
  const auto [ir, tr] = bracket(distances_, std::log(std::max(r_rup_km, 1e-3)));
  const std::size_t nm = magnitudes_.size();
  const std::size_t nr = distances_.size();
  const auto node = [&](std::size_t a, std::size_t b) -> const std::vector<double>& {
    return coeffs_[std::min(a, nm - 1) * nr + std::min(b, nr - 1)];
  };
  double c[7];
  for (int k = 0; k < 7; ++k) {
    const double v00 = node(im, ir)[k];
    const double v01 = node(im, ir + 1)[k];
    const double v10 = node(im + 1, ir)[k];
    const double v11 = node(im + 1, ir + 1)[k];
    c[k] = (1 - tm) * ((1 - tr) * v00 + tr * v01) + tm * ((1 - tr) * v10 + tr * v11);
  }
  const double ec3 = std::pow(eta, c[2]);
  const double first = c[0] + c[1] * (1.0 - ec3) / (1.0 + ec3);
  const double inner = eta / (1.0 + c[4] * std::pow(eta, c[5]));
  const double second = 1.0 + c[3] / (2.0 * std::numbers::pi * zeta) * std::pow(inner, c[6]);
  return first * second;
}

std::string RmsDurationModel::name() const {
  if (variant == Variant::bt15) return table ? table->name() : "BT15";
  return "oscillator-correction";
}

double oscillator_duration(double d_gm, const Oscillator& osc) {
  const double t0 = osc.period();
  const double g3 = std::pow(d_gm / t0, 3);
  return t0 / (2.0 * std::numbers::pi * osc.zeta) * g3 / (g3 + 1.0 / 3.0);
}

double rms_duration(const DurationResult& d_gm, const Oscillator& osc, const Scenario& scn,
                    const RmsDurationModel& model) {
  if (!(d_gm.d_gm > 0.0)) throw ValidationError("ground-motion duration must be > 0");
  if (model.variant == RmsDurationModel::Variant::oscillator_correction) {
    return d_gm.d_gm + oscillator_duration(d_gm.d_gm, osc);
  }
  if (!model.table) throw ConfigError("BT15 D_rms variant selected without a coefficient table");
  const double ratio =
      model.table->ratio(scn.magnitude, scn.r_rup_km, osc.period() / d_gm.d_gm, osc.zeta);
  // D_o >= 0 is enforced for tables whose fitted ratio dips below one.
  return d_gm.d_gm * std::max(ratio, 1.0);
}

}  // namespace nergpsa

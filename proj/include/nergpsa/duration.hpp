#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nergpsa/spectra.hpp"

namespace nergpsa {

// Significant-duration model of the additive source + path + site form
//   D_5-75 = 1/f_c + c1 (R_rup - R_c) + c2 S
// plus the quadratic interval conversion to D_0.05-I.
struct As96Coefficients {
  std::string model = "AS96";
  std::string version;
  double c1 = 0.0;   // s/km
  double c2 = 0.0;   // s
  double r_c = 0.0;  // km
  double beta_kms = 3.2;
  double stress_drop_bar = 100.0;
  // Optional magnitude-dependent stress drop ln Δσ = b1 + b2 (M - m_ref).
  std::optional<double> stress_b1;
  std::optional<double> stress_b2;
  double stress_m_ref = 6.0;
  // ln(D_0.05-I / D_5-75) = a1 + a2 L + a3 L^2, L = ln((I - 0.05)/(1 - I))
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;

  void validate() const;
  double stress_drop(double magnitude) const;
  static As96Coefficients load(const std::string& path);
};

struct DurationResult {
  double d_gm = 0.0;  // s
  std::string interval;
  std::string provenance;
};

DurationResult user_duration(double seconds, std::string interval = "user");

DurationResult as96_d575(const Scenario& scn, const As96Coefficients& coeffs);
DurationResult as96_interval(const DurationResult& d575, double interval,
                             const As96Coefficients& coeffs);
// Convenience: D_a0.05-0.85, the default ground-motion duration.
DurationResult as96_dgm(const Scenario& scn, const As96Coefficients& coeffs,
                        double interval = 0.85);

// Boore-Thompson style D_rms / D_gm table. Each node of the (M, R) grid holds
// seven coefficients of
//   ratio = (c1 + c2 (1 - η^c3)/(1 + η^c3)) (1 + c4/(2πζ) (η/(1 + c5 η^c6))^c7)
// with η = T0/D_gm. Coefficients are bilinearly interpolated in (M, ln R).
class Bt15Table {
 public:
  Bt15Table() = default;
  Bt15Table(std::vector<double> magnitudes, std::vector<double> distances_km,
            std::vector<std::vector<double>> coeffs, std::string name = "BT15");
  static Bt15Table load(const std::string& path);

  double ratio(double magnitude, double r_rup_km, double eta, double zeta) const;
  double min_magnitude() const { return magnitudes_.front(); }
  const std::string& name() const noexcept { return name_; }

 private:
  std::vector<double> magnitudes_;
  std::vector<double> distances_;
  // coeffs_[im * distances_.size() + ir] -> 7 coefficients
  std::vector<std::vector<double>> coeffs_;
  std::string name_;
};

struct RmsDurationModel {
  enum class Variant { oscillator_correction, bt15 };
  Variant variant = Variant::oscillator_correction;
  std::optional<Bt15Table> table;

  static RmsDurationModel closed_form() { return {}; }
  static RmsDurationModel bt15(Bt15Table t) { return {Variant::bt15, std::move(t)}; }
  std::string name() const;
};

// Closed-form oscillator-decay term D_o = T0/(2πζ) γ^3/(γ^3 + 1/3), γ = D_gm/T0.
double oscillator_duration(double d_gm, const Oscillator& osc);

// D_rms >= D_gm for both variants.
double rms_duration(const DurationResult& d_gm, const Oscillator& osc, const Scenario& scn,
                    const RmsDurationModel& model);

}  // namespace nergpsa

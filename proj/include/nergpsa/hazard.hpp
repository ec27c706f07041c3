#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nergpsa/spectra.hpp"

namespace nergpsa {

struct ScenarioRate {
  std::string id;
  Scenario scenario;
  double annual_rate = 0.0;  // 1/yr
  double median_ln = 0.0;    // ln PSA at the hazard period
  double sigma = 0.0;        // ln units

  void validate() const;
};

struct HazardCurve {
  std::vector<double> levels;  // g, ascending
  std::vector<double> rates;   // annual exceedance

  void validate() const;
};

struct HazardOptions {
  // Ground-motion truncation at n sigma; none by default.
  std::optional<double> truncation_sigma;
};

// Default intensity grid: 30 log-spaced points over [0.001, 3] g.
std::vector<double> default_hazard_levels();

// Φᶜ(x) = P(Z > x)
double normal_survival(double x);

// rate(a) = Σ λ_i Φᶜ((ln a - μ_i)/σ_i)
HazardCurve scenario_hazard(const std::vector<ScenarioRate>& scenarios,
                            const std::vector<double>& levels, const HazardOptions& opts = {});

struct LogicTreeBranch {
  double weight = 0.0;
  std::string backbone;
  std::optional<std::size_t> realization;
};

struct LogicTree {
  std::vector<LogicTreeBranch> branches;
  void validate() const;  // weights > 0, summing to 1 within 1e-12
};

struct HazardAggregate {
  std::vector<double> levels;
  std::vector<double> mean;
  std::vector<double> median;
  std::vector<double> p02;
  std::vector<double> p16;
  std::vector<double> p84;
  std::vector<double> p98;
};

// Weighted quantile over branch values: sorted values sit at the weighted
// midpoint positions P_i = W_{i-1} + w_i/2 of the empirical CDF, which is
// inverted with linear interpolation between neighbours and held flat
// outside [P_1, P_n].
double weighted_quantile(std::vector<double> values, std::vector<double> weights, double prob);

HazardAggregate aggregate_tree(const LogicTree& tree, const std::vector<HazardCurve>& curves);

// Level at a target annual rate, interpolated in log-log space.
// std::nullopt when the curve never crosses the rate.
std::optional<double> level_at_rate(const std::vector<double>& levels,
                                    const std::vector<double>& rates, double target_rate);

// d ln(rate) / d ln(level) at the crossing of target_rate (negative).
std::optional<double> log_slope_at_rate(const std::vector<double>& levels,
                                        const std::vector<double>& rates, double target_rate);

}  // namespace nergpsa

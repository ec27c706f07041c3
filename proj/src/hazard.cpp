#include "nergpsa/hazard.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nergpsa/errors.hpp"

namespace nergpsa {

void ScenarioRate::validate() const {
  scenario.validate();
  if (!(annual_rate > 0.0)) throw ValidationError("scenario '" + id + "': rate must be > 0");
  if (!(sigma > 0.0)) throw ValidationError("scenario '" + id + "': sigma must be > 0");
  if (!std::isfinite(median_ln)) {
    throw ValidationError("scenario '" + id + "': median ln PSA must be finite");
  }
}

void HazardCurve::validate() const {
  if (levels.size() != rates.size()) throw ValidationError("hazard curve: length mismatch");
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (rates[i] < 0.0) throw ValidationError("hazard curve: rates must be >= 0");
    if (i > 0 && rates[i] > rates[i - 1]) {
      throw ValidationError("hazard curve: rates must be non-increasing in intensity");
    }
  }
}

std::vector<double> default_hazard_levels() {
  const auto g = FrequencyGrid::log_spaced(0.001, 3.0, 30);
  return {g.freqs().begin(), g.freqs().end()};
}

double normal_survival(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

HazardCurve scenario_hazard(const std::vector<ScenarioRate>& scenarios,
                            const std::vector<double>& levels, const HazardOptions& opts) {
  if (scenarios.empty()) throw ValidationError("hazard: scenario list is empty");
  if (levels.empty()) throw ValidationError("hazard: intensity levels are empty");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0)) throw DomainError("hazard: intensity levels must be > 0");
    if (i > 0 && !(levels[i] > levels[i - 1])) {
      throw ValidationError("hazard: intensity levels must be strictly ascending");
    }
  }
  for (const auto& s : scenarios) s.validate();
  if (opts.truncation_sigma && !(*opts.truncation_sigma > 0.0)) {
    throw ConfigError("hazard: truncation must be > 0 sigma");
  }

  HazardCurve curve;
  curve.levels = levels;
  curve.rates.assign(levels.size(), 0.0);
  const double tail_at_cut =
      opts.truncation_sigma ? normal_survival(*opts.truncation_sigma) : 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double ln_a = std::log(levels[i]);
    double total = 0.0;
    for (const auto& s : scenarios) {
      const double z = (ln_a - s.median_ln) / s.sigma;
      double p = normal_survival(z);
      if (opts.truncation_sigma) {
        p = z >= *opts.truncation_sigma ? 0.0 : (p - tail_at_cut) / (1.0 - tail_at_cut);
      }
      total += s.annual_rate * p;
    }
    curve.rates[i] = total;
  }
  return curve;
}

void LogicTree::validate() const {
  if (branches.empty()) throw ValidationError("logic tree has no branches");
  double sum = 0.0;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    if (!(branches[i].weight > 0.0)) {
      throw ValidationError("logic tree: branch " + std::to_string(i) + " weight must be > 0");
    }
    sum += branches[i].weight;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ValidationError("logic tree: branch weights must sum to 1 (sum = " +
                          std::to_string(sum) + ")");
  }
}

double weighted_quantile(std::vector<double> values, std::vector<double> weights, double prob) {
  if (values.empty() || values.size() != weights.size()) {
    throw ValidationError("weighted quantile: values and weights must be nonempty and aligned");
  }
  if (!(prob >= 0.0 && prob <= 1.0)) throw DomainError("quantile probability must be in [0, 1]");
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);

  std::vector<double> pos(idx.size());
  std::vector<double> val(idx.size());
  double cum = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double w = weights[idx[k]] / total;
    pos[k] = cum + 0.5 * w;
    val[k] = values[idx[k]];
    cum += w;
  }
  if (prob <= pos.front()) return val.front();
  if (prob >= pos.back()) return val.back();
  const auto it = std::upper_bound(pos.begin(), pos.end(), prob);
  const auto hi = static_cast<std::size_t>(it - pos.begin());
  const auto lo = hi - 1;
  const double t = (prob - pos[lo]) / (pos[hi] - pos[lo]);
  return val[lo] + t * (val[hi] - val[lo]);
}

HazardAggregate aggregate_tree(const LogicTree& tree, const std::vector<HazardCurve>& curves) {
  tree.validate();
  if (curves.size() != tree.branches.size()) {
    throw ValidationError("logic tree has " + std::to_string(tree.branches.size()) +
                          " branches but " + std::to_string(curves.size()) + " curves were given");
  }
  const auto& levels = curves.front().levels;
  for (const auto& c : curves) {
    if (c.levels != levels) throw ValidationError("logic tree curves must share the level grid");
  }
  std::vector<double> weights;
  for (const auto& b : tree.branches) weights.push_back(b.weight);

  HazardAggregate agg;
  agg.levels = levels;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    std::vector<double> rates;
    rates.reserve(curves.size());
    double mean = 0.0;
    for (std::size_t b = 0; b < curves.size(); ++b) {
      rates.push_back(curves[b].rates[i]);
      mean += weights[b] * curves[b].rates[i];
    }
    const double lo = *std::min_element(rates.begin(), rates.end());
    const double hi = *std::max_element(rates.begin(), rates.end());
    agg.mean.push_back(std::clamp(mean, lo, hi));
    agg.median.push_back(weighted_quantile(rates, weights, 0.50));
    agg.p02.push_back(weighted_quantile(rates, weights, 0.02));
    agg.p16.push_back(weighted_quantile(rates, weights, 0.16));
    agg.p84.push_back(weighted_quantile(rates, weights, 0.84));
    agg.p98.push_back(weighted_quantile(rates, weights, 0.98));
  }
  return agg;
}

namespace {

std::optional<std::size_t> crossing(const std::vector<double>& levels,
                                    const std::vector<double>& rates, double target) {
  if (levels.size() != rates.size() || levels.size() < 2 || !(target > 0.0)) return std::nullopt;
  for (std::size_t i = 0; i + 1 < rates.size(); ++i) {
    if (rates[i] >= target && rates[i + 1] <= target && rates[i + 1] > 0.0) return i;
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> level_at_rate(const std::vector<double>& levels,
                                    const std::vector<double>& rates, double target_rate) {
  const auto i = crossing(levels, rates, target_rate);
  if (!i) return std::nullopt;
  const double x0 = std::log(levels[*i]);
  const double x1 = std::log(levels[*i + 1]);
  const double y0 = std::log(rates[*i]);
  const double y1 = std::log(rates[*i + 1]);
  if (y0 == y1) return levels[*i];
  const double t = (std::log(target_rate) - y0) / (y1 - y0);
  return std::exp(x0 + t * (x1 - x0));
}

std::optional<double> log_slope_at_rate(const std::vector<double>& levels,
                                        const std::vector<double>& rates, double target_rate) {
  const auto i = crossing(levels, rates, target_rate);
  if (!i) return std::nullopt;
  return (std::log(rates[*i + 1]) - std::log(rates[*i])) /
         (std::log(levels[*i + 1]) - std::log(levels[*i]));
}

}  // namespace nergpsa

#include "nergpsa/residuals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "nergpsa/errors.hpp"

namespace nergpsa {

namespace {

bool same_period(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(a, b); }

struct Summary {
  double mean = 0.0;
  std::optional<double> std;
};

std::optional<Summary> summarize(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  Summary s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

}  // namespace

ResidualTable rows_at_period(const ResidualTable& tbl, double period) {
  ResidualTable out;
  for (const auto& r : tbl) {
    if (same_period(r.period, period)) out.push_back(r);
  }
  return out;
}

std::vector<double> table_periods(const ResidualTable& tbl) {
  std::vector<double> ps;
  for (const auto& r : tbl) {
    if (std::none_of(ps.begin(), ps.end(), [&](double p) { return same_period(p, r.period); })) {
      ps.push_back(r.period);
    }
  }
  std::sort(ps.begin(), ps.end());
  return ps;
}

Decomposition decompose(const ResidualTable& rows, const DecomposeOptions& opts) {
  if (rows.empty()) throw ValidationError("decompose: no residual rows");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!std::isfinite(rows[i].residual)) {
      throw ValidationError("decompose: residual must be finite (row " + std::to_string(i + 1) +
                            ")");
    }
    if (rows[i].event_id.empty()) {
      throw ValidationError("decompose: row " + std::to_string(i + 1) + " has no event id");
    }
  }

  Decomposition dec;
  dec.period = rows.front().period;

  // Events ordered by id so the result is independent of row order.
  std::map<std::string, std::size_t> index;
  for (const auto& r : rows) index.emplace(r.event_id, 0);
  std::size_t k = 0;
  for (auto& [id, idx] : index) {
    idx = k++;
    dec.events.push_back({id, 0.0, 0, 0.0, 0.0});
  }
  const std::size_t n_events = dec.events.size();
  if (n_events < 2) {
    throw ValidationError("variance components unidentifiable: at least 2 events required");
  }

  // Per-event sums accumulated in sorted-row order for permutation invariance.
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = rows[a];
    const auto& rb = rows[b];
    if (ra.event_id != rb.event_id) return ra.event_id < rb.event_id;
    if (ra.station_id != rb.station_id) return ra.station_id < rb.station_id;
    return ra.residual < rb.residual;
  });

  dec.row_event.resize(rows.size());
  for (std::size_t i : order) {
    const std::size_t e = index.at(rows[i].event_id);
    dec.row_event[i] = e;
    dec.events[e].magnitude = rows[i].magnitude;
    dec.events[e].n_records += 1;
    dec.events[e].raw_mean += rows[i].residual;
  }
  bool has_replicate = false;
  for (auto& ev : dec.events) {
    ev.raw_mean /= static_cast<double>(ev.n_records);
    has_replicate = has_replicate || ev.n_records >= 2;
  }
  if (!has_replicate) {
    throw ValidationError(
        "variance components unidentifiable: at least one event needs 2 or more records");
  }

  double within_ss = 0.0;
  for (std::size_t i : order) {
    const double d = rows[i].residual - dec.events[dec.row_event[i]].raw_mean;
    within_ss += d * d;
  }
  const double phi2 = within_ss / static_cast<double>(rows.size() - n_events);
  dec.degenerate = !(phi2 > 0.0);

  // Fixed-point iteration on (δc0, τ²).
  const auto event_var = [&](double tau2, const EventTerm& ev) {
    return tau2 + phi2 / static_cast<double>(ev.n_records);
  };
  double c = 0.0;
  double tau2 = 0.0;
  {
    double mean_of_means = 0.0;
    for (const auto& ev : dec.events) mean_of_means += ev.raw_mean;
    mean_of_means /= static_cast<double>(n_events);
    double var = 0.0;
    double noise = 0.0;
    for (const auto& ev : dec.events) {
      var += (ev.raw_mean - mean_of_means) * (ev.raw_mean - mean_of_means);
      noise += phi2 / static_cast<double>(ev.n_records);
    }
    c = mean_of_means;
    tau2 = std::max(0.0, (var - noise) / static_cast<double>(n_events));
  }

  bool converged = false;
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    dec.iterations = it;
    double sw = 0.0;
    double swy = 0.0;
    for (const auto& ev : dec.events) {
      const double v = event_var(tau2, ev);
      const double w = v > 0.0 ? 1.0 / v : 1.0;
      sw += w;
      swy += w * ev.raw_mean;
    }
    const double c_new = swy / sw;

    double num = 0.0;
    double den = 0.0;
    for (const auto& ev : dec.events) {
      const double v = event_var(tau2, ev);
      const double w = v > 0.0 ? 1.0 / v : 1.0;
      const double r = ev.raw_mean - c_new;
      num += w * w * (r * r - phi2 / static_cast<double>(ev.n_records));
      den += w * w;
    }
    const double tau2_new = std::max(0.0, num / den);

    const double change = std::abs(c_new - c) + std::abs(tau2_new - tau2);
    c = c_new;
    tau2 = tau2_new;
    if (change < opts.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NumericalError("decompose: variance-component iteration did not converge within " +
                         std::to_string(opts.max_iterations) + " iterations");
  }

  dec.dc0 = c;
  dec.tau0 = std::sqrt(tau2);
  dec.phi0 = std::sqrt(phi2);
  for (auto& ev : dec.events) {
    const double v = event_var(tau2, ev);
    const double shrink = v > 0.0 ? tau2 / v : 1.0;
    ev.dB = shrink * (ev.raw_mean - c);
  }
  dec.dB.resize(rows.size());
  dec.dWS.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    dec.dB[i] = dec.events[dec.row_event[i]].dB;
    dec.dWS[i] = rows[i].residual - dec.dc0 - dec.dB[i];
  }
  return dec;
}

Decomposition decompose(const ResidualTable& tbl, double period, const DecomposeOptions& opts) {
  auto rows = rows_at_period(tbl, period);
  if (rows.empty()) {
    throw ValidationError("decompose: no residuals at period " + std::to_string(period) + " s");
  }
  auto dec = decompose(rows, opts);
  dec.period = period;
  return dec;
}

BinAxis parse_bin_axis(const std::string& name) {
  if (name == "magnitude" || name == "M") return BinAxis::magnitude;
  if (name == "r_rup" || name == "r_rup_km" || name == "R_rup") return BinAxis::r_rup;
  if (name == "vs30" || name == "vs30_ms" || name == "V_S30") return BinAxis::vs30;
  throw ValidationError("unknown bin axis '" + name + "' (expected magnitude, r_rup or vs30)");
}

std::string to_string(BinAxis axis) {
  switch (axis) {
    case BinAxis::magnitude:
      return "magnitude";
    case BinAxis::r_rup:
      return "r_rup";
    case BinAxis::vs30:
      return "vs30";
  }
  return "?";
}

std::vector<BinStats> binned_stats(const ResidualTable& rows, const Decomposition& dec,
                                   BinAxis axis, const std::vector<double>& edges) {
  if (edges.size() < 2) throw ValidationError("binned_stats: at least two bin edges required");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw ValidationError("binned_stats: edges must ascend");
  }
  if (rows.size() != dec.dWS.size()) {
    throw ValidationError("binned_stats: decomposition does not belong to these rows");
  }
  const std::size_t nb = edges.size() - 1;
  std::vector<std::vector<double>> ws(nb);
  std::vector<std::set<std::size_t>> ev(nb);

  for (std::size_t i = 0; i < rows.size(); ++i) {
    double x = 0.0;
    switch (axis) {
      case BinAxis::magnitude:
        x = rows[i].magnitude;
        break;
      case BinAxis::r_rup:
        x = rows[i].r_rup_km;
        break;
      case BinAxis::vs30:
        x = rows[i].vs30_ms;
        break;
    }
    if (x < edges.front() || x > edges.back()) {
      throw ValidationError("binned_stats: row " + std::to_string(i + 1) + " (" +
                            to_string(axis) + " = " + std::to_string(x) +
                            ") falls outside the bins");
    }
    auto it = std::upper_bound(edges.begin(), edges.end(), x);
    std::size_t b = static_cast<std::size_t>(it - edges.begin());
    b = b == 0 ? 0 : std::min(b - 1, nb - 1);
    ws[b].push_back(dec.dWS[i]);
    ev[b].insert(dec.row_event[i]);
  }

  std::vector<BinStats> out(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    out[b].lo = edges[b];
    out[b].hi = edges[b + 1];
    out[b].n_records = ws[b].size();
    out[b].n_events = ev[b].size();
    std::vector<double> db;
    for (std::size_t e : ev[b]) db.push_back(dec.events[e].dB);
    if (auto s = summarize(db)) {
      out[b].dB_mean = s->mean;
      out[b].dB_std = s->std;
    }
    if (auto s = summarize(ws[b])) {
      out[b].dWS_mean = s->mean;
      out[b].dWS_std = s->std;
    }
  }
  return out;
}

}  // namespace nergpsa

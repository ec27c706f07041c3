#pragma once

#include <optional>
#include <string>
#include <vector>

namespace nergpsa {

struct ResidualRow {
  std::string event_id;
  std::string station_id;
  double magnitude = 0.0;
  double r_rup_km = 0.0;
  double vs30_ms = 0.0;
  double period = 0.0;
  double residual = 0.0;  // total residual, ln units
};

using ResidualTable = std::vector<ResidualRow>;

// Rows of the table at one period (relative match 1e-9).
ResidualTable rows_at_period(const ResidualTable& tbl, double period);
// Distinct periods in ascending order.
std::vector<double> table_periods(const ResidualTable& tbl);

struct EventTerm {
  std::string event_id;
  double magnitude = 0.0;
  std::size_t n_records = 0;
  double raw_mean = 0.0;  // mean residual of the event
  double dB = 0.0;        // shrunken between-event term
};

struct Decomposition {
  double period = 0.0;
  double dc0 = 0.0;
  double tau0 = 0.0;
  double phi0 = 0.0;
  std::vector<EventTerm> events;  // sorted by event id
  // One entry per input row, in the input order.
  std::vector<std::size_t> row_event;  // index into events
  std::vector<double> dB;
  std::vector<double> dWS;
  std::size_t iterations = 0;
  // No within-event scatter (φ0 == 0).
  bool degenerate = false;
};

struct DecomposeOptions {
  double tolerance = 1e-8;
  std::size_t max_iterations = 10000;
};

// ε = δc0 + δB_e + δWS_{e,s}. δc0 is the precision-weighted mean of event
// means, δB_e = τ²/(τ² + φ²/n_e) (ȳ_e - δc0), δWS is the remainder so the
// partition is exact. φ² is the pooled within-event variance, τ² solves the
// one-way random-effects likelihood equation by fixed-point iteration.
Decomposition decompose(const ResidualTable& rows, const DecomposeOptions& opts = {});
Decomposition decompose(const ResidualTable& tbl, double period,
                        const DecomposeOptions& opts = {});

enum class BinAxis { magnitude, r_rup, vs30 };
BinAxis parse_bin_axis(const std::string& name);
std::string to_string(BinAxis axis);

struct BinStats {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n_events = 0;
  std::size_t n_records = 0;
  std::optional<double> dB_mean;
  std::optional<double> dB_std;
  std::optional<double> dWS_mean;
  std::optional<double> dWS_std;
};

// Bins are [e_i, e_{i+1}), the last one closed. δB statistics run over the
// distinct events with a record in the bin, δWS over records. Standard
// deviations use the n-1 denominator and are null below two values.
std::vector<BinStats> binned_stats(const ResidualTable& rows, const Decomposition& dec,
                                   BinAxis axis, const std::vector<double>& edges);

}  // namespace nergpsa

// nergpsa: command-line front end. Every command writes its outputs plus a
// manifest.json into --out.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nergpsa/csv.hpp"
#include "nergpsa/errors.hpp"
#include "nergpsa/io.hpp"

namespace fs = std::filesystem;
using namespace nergpsa;
using nlohmann::json;

namespace {

struct Common {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
};

class Run {
 public:
  Run(std::string command, const Common& common) : common_(common) {
    manifest_.command = std::move(command);
    cfg_ = io::load_run_config(common.config);
    manifest_.config_digest = "fnv1a64:" + io::hex64(io::fnv1a64(cfg_.canonical_json));
    if (common.config) add_input(*common.config);
    std::error_code ec;
    fs::create_directories(common.out, ec);
    if (ec || !fs::is_directory(common.out)) {
      throw IoError("cannot create output directory '" + common.out + "'");
    }
  }

  const io::RunConfig& config() const { return cfg_; }

  void add_input(const std::string& path) {
    manifest_.inputs.push_back(path + " " + io::file_digest(path));
  }

  std::uint64_t seed() {
    if (!manifest_.seed) {
      if (common_.seed) {
        manifest_.seed = *common_.seed;
      } else {
        std::random_device rd;
        manifest_.seed = (std::uint64_t{rd()} << 32) | rd();
        manifest_.seed_generated = true;
      }
    }
    return *manifest_.seed;
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = (fs::path(common_.out) / name).string();
    io::write_text(path, content);
    manifest_.outputs.emplace_back(name, "fnv1a64:" + io::hex64(io::fnv1a64(content)));
  }

  void finish(json tolerances = json::object()) {
    const auto& pf = cfg_.rvt.pf;
    tolerances["peak_factor_abs"] = pf.abs_tolerance;
    tolerances["peak_factor_rel"] = pf.rel_tolerance;
    tolerances["peak_factor_max_intervals"] = pf.max_intervals;
    manifest_.tolerances_json = tolerances.dump();
    manifest_.timestamp = io::utc_timestamp();
    io::write_manifest((fs::path(common_.out) / "manifest.json").string(), manifest_);
  }

 private:
  Common common_;
  io::RunConfig cfg_;
  io::RunManifest manifest_;
};

std::string fmt(double v) { return csv::format(v); }

// ---------------------------------------------------------------------------

void cmd_psa(const Common& c, const std::string& eas_path, const std::string& scn_path) {
  Run run("psa", c);
  const auto eas = io::read_eas_csv(eas_path);
  const auto scn = io::read_scenario_json(scn_path);
  run.add_input(eas_path);
  run.add_input(scn_path);
  const auto psa = psa_spectrum(eas, scn, run.config().rvt);
  run.write("psa.csv", io::psa_csv_text(psa));
  run.finish();
}

void cmd_extrapolate(const Common& c, const std::string& eas_path, const std::string& scn_path) {
  Run run("extrapolate", c);
  const auto eas = io::read_eas_csv(eas_path);
  const auto scn = io::read_scenario_json(scn_path);
  run.add_input(eas_path);
  run.add_input(scn_path);
  auto cfg = run.config().rvt;
  cfg.extrapolate = true;
  const auto ext = prepare_spectrum(eas, scn, cfg);
  run.write("eas_extrapolated.csv", io::eas_csv_text(ext));
  run.finish();
}

NonErgodicField load_field(Run& run, const std::string& field_path,
                           const std::optional<std::string>& corr_path) {
  auto corr = run.config().correlation;
  if (corr_path) {
    corr = io::read_correlation_json(*corr_path);
    run.add_input(*corr_path);
  }
  run.add_input(field_path);
  return io::read_field_csv(field_path, corr);
}

void cmd_fnerg(const Common& c, const std::string& erg_path,
               const std::optional<std::string>& nerg_path,
               const std::optional<std::string>& field_path,
               const std::optional<std::string>& corr_path, const std::string& scn_path,
               std::size_t n) {
  Run run("fnerg", c);
  const auto erg = io::read_eas_csv(erg_path);
  const auto scn = io::read_scenario_json(scn_path);
  run.add_input(erg_path);
  run.add_input(scn_path);
  const auto& cfg = run.config().rvt;

  std::vector<FnergResult> results;
  if (nerg_path) {
    run.add_input(*nerg_path);
    results.push_back(fnerg_factor(erg, io::read_eas_csv(*nerg_path), scn, cfg));
    results.back().realization = 0;
  } else {
    const FieldSampler sampler(load_field(run, *field_path, corr_path));
    results = fnerg_realizations(erg, sampler, n, run.seed(), scn, cfg);
  }

  std::string out = "realization,period_s,fnerg\n";
  for (const auto& r : results) {
    for (std::size_t k = 0; k < r.periods.size(); ++k) {
      out += std::to_string(r.realization.value_or(0)) + "," + fmt(r.periods[k]) + "," +
             fmt(r.values[k]) + "\n";
    }
  }
  if (results.size() > 1) {
    const auto& periods = results.front().periods;
    const double m = static_cast<double>(results.size());
    std::vector<double> mean(periods.size(), 0.0);
    std::vector<double> sd(periods.size(), 0.0);
    for (const auto& r : results) {
      for (std::size_t k = 0; k < periods.size(); ++k) mean[k] += r.values[k] / m;
    }
    for (const auto& r : results) {
      for (std::size_t k = 0; k < periods.size(); ++k) {
        sd[k] += (r.values[k] - mean[k]) * (r.values[k] - mean[k]);
      }
    }
    for (std::size_t k = 0; k < periods.size(); ++k) {
      out += "mean," + fmt(periods[k]) + "," + fmt(mean[k]) + "\n";
    }
    for (std::size_t k = 0; k < periods.size(); ++k) {
      out += "sd," + fmt(periods[k]) + "," + fmt(std::sqrt(sd[k] / (m - 1.0))) + "\n";
    }
  }
  run.write("fnerg.csv", out);
  run.finish();
}

void cmd_sample(const Common& c, const std::string& field_path,
                const std::optional<std::string>& corr_path,
                const std::optional<std::string>& erg_path, std::size_t n) {
  Run run("sample", c);
  const auto field = load_field(run, field_path, corr_path);
  const FieldSampler sampler(field);
  const auto seed = run.seed();
  std::optional<EasSpectrum> erg;
  if (erg_path) {
    erg = io::read_eas_csv(*erg_path);
    run.add_input(*erg_path);
  }

  std::string samples = "realization,frequency_hz,adjustment_ln\n";
  std::string spectra = "realization,frequency_hz,eas\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto adj = sampler.sample(seed, i);
    for (std::size_t k = 0; k < adj.size(); ++k) {
      samples += std::to_string(i) + "," + fmt(field.grid[k]) + "," + fmt(adj[k]) + "\n";
    }
    if (erg) {
      const auto nerg = apply_adjustment(*erg, field.grid, adj);
      for (std::size_t k = 0; k < nerg.size(); ++k) {
        spectra += std::to_string(i) + "," + fmt(nerg.freqs()[k]) + "," + fmt(nerg.amps()[k]) + "\n";
      }
    }
  }
  run.write("samples.csv", samples);
  if (erg) run.write("eas_realizations.csv", spectra);
  run.finish();
}

void cmd_decompose(const Common& c, const std::string& res_path, std::optional<double> period,
                   const std::optional<std::string>& axis_name, const std::vector<double>& edges) {
  Run run("decompose", c);
  const auto tbl = io::read_residuals_csv(res_path);
  run.add_input(res_path);
  std::optional<BinAxis> axis;
  if (axis_name) axis = parse_bin_axis(*axis_name);
  if (axis && edges.size() < 2) throw ValidationError("--bins needs at least two edges");

  std::vector<double> periods = period ? std::vector<double>{*period} : table_periods(tbl);
  std::string comps = "period_s,dc0,tau0,phi0,sigma0,n_events,n_records,iterations\n";
  std::string events = "period_s,event_id,magnitude,n_records,raw_mean,dB\n";
  std::string records = "period_s,event_id,station_id,residual_ln,dc0,dB,dWS\n";
  std::string bins = "period_s,axis,lo,hi,n_events,n_records,dB_mean,dB_std,dWS_mean,dWS_std\n";
  const auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };

  for (double T : periods) {
    const auto rows = rows_at_period(tbl, T);
    if (rows.empty()) {
      throw ValidationError(res_path + ": no rows at period " + fmt(T));
    }
    Decomposition dec;
    try {
      dec = decompose(rows);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::validation) {
        throw ValidationError(res_path + ": period " + fmt(T) + ": " + e.what());
      }
      throw;
    }
    comps += fmt(T) + "," + fmt(dec.dc0) + "," + fmt(dec.tau0) + "," + fmt(dec.phi0) + "," +
             fmt(std::hypot(dec.tau0, dec.phi0)) + "," + std::to_string(dec.events.size()) + "," +
             std::to_string(rows.size()) + "," + std::to_string(dec.iterations) + "\n";
    for (const auto& e : dec.events) {
      events += fmt(T) + "," + e.event_id + "," + fmt(e.magnitude) + "," +
                std::to_string(e.n_records) + "," + fmt(e.raw_mean) + "," + fmt(e.dB) + "\n";
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      records += fmt(T) + "," + rows[i].event_id + "," + rows[i].station_id + "," +
                 fmt(rows[i].residual) + "," + fmt(dec.dc0) + "," + fmt(dec.dB[i]) + "," +
                 fmt(dec.dWS[i]) + "\n";
    }
    if (axis) {
      for (const auto& b : binned_stats(rows, dec, *axis, edges)) {
        bins += fmt(T) + "," + to_string(*axis) + "," + fmt(b.lo) + "," + fmt(b.hi) + "," +
                std::to_string(b.n_events) + "," + std::to_string(b.n_records) + "," +
                opt(b.dB_mean) + "," + opt(b.dB_std) + "," + opt(b.dWS_mean) + "," +
                opt(b.dWS_std) + "\n";
      }
    }
  }
  run.write("components.csv", comps);
  run.write("event_terms.csv", events);
  run.write("records.csv", records);
  if (axis) run.write("binned.csv", bins);
  json tol;
  const DecomposeOptions defaults;
  tol["decompose_tolerance"] = defaults.tolerance;
  tol["decompose_max_iterations"] = defaults.max_iterations;
  run.finish(tol);
}

void cmd_hazard(const Common& c, const std::string& scn_path, const std::string& br_path) {
  Run run("hazard", c);
  const auto inputs = io::read_hazard_scenarios_json(scn_path);
  run.add_input(scn_path);
  const auto set = io::read_branches_json(br_path, inputs);
  run.add_input(br_path);
  const auto levels = run.config().hazard_levels.value_or(default_hazard_levels());

  std::vector<HazardCurve> curves;
  curves.reserve(set.tree.branches.size());
  std::string per_branch = "branch,weight,level_g,rate\n";
  for (std::size_t b = 0; b < set.tree.branches.size(); ++b) {
    curves.push_back(
        scenario_hazard(io::branch_scenarios(inputs, set, b), levels, run.config().hazard));
    for (std::size_t i = 0; i < levels.size(); ++i) {
      per_branch += std::to_string(b) + "," + fmt(set.tree.branches[b].weight) + "," +
                    fmt(levels[i]) + "," + fmt(curves.back().rates[i]) + "\n";
    }
  }
  const auto agg = aggregate_tree(set.tree, curves);
  run.write("hazard.csv", io::hazard_csv_text(agg));
  run.write("hazard_branches.csv", per_branch);
  json tol;
  if (run.config().hazard.truncation_sigma) tol["truncation_sigma"] = *run.config().hazard.truncation_sigma;
  run.finish(tol);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-vibration PSA, non-ergodic factors, residuals and hazard"};
  app.require_subcommand(1);
  Common common;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "run configuration (JSON)");
    sub->add_option("--seed", common.seed, "RNG seed (random and recorded when absent)");
    sub->add_option("--out", common.out, "output directory")->capture_default_str();
  };

  std::string eas, scenario, residuals, hazard_scn, branches;
  std::optional<std::string> eas_nerg, field, correlation, eas_erg, bins_axis;
  std::optional<double> period;
  std::vector<double> bins;
  std::size_t samples = 100;

  auto* psa = app.add_subcommand("psa", "EAS -> PSA spectrum");
  psa->add_option("--eas", eas, "EAS CSV (frequency_hz,eas)")->required();
  psa->add_option("--scenario", scenario, "scenario JSON")->required();
  add_common(psa);

  auto* ext = app.add_subcommand("extrapolate", "extend an EAS to the configured band");
  ext->add_option("--eas", eas, "EAS CSV")->required();
  ext->add_option("--scenario", scenario, "scenario JSON")->required();
  add_common(ext);

  auto* fn = app.add_subcommand("fnerg", "non-ergodic PSA factors");
  fn->add_option("--eas-erg", eas, "ergodic EAS CSV")->required();
  auto* o_nerg = fn->add_option("--eas-nerg", eas_nerg, "non-ergodic EAS CSV");
  auto* o_field = fn->add_option("--field", field, "adjustment field CSV (frequency_hz,mean_ln,sd_ln)");
  o_nerg->excludes(o_field);
  fn->add_option("--correlation", correlation, "correlation JSON, overrides the config");
  fn->add_option("--scenario", scenario, "scenario JSON")->required();
  fn->add_option("--samples", samples, "field realizations")->capture_default_str()->check(CLI::PositiveNumber);
  add_common(fn);

  auto* smp = app.add_subcommand("sample", "draw correlated adjustment fields");
  smp->add_option("--field", field, "adjustment field CSV")->required();
  smp->add_option("--correlation", correlation, "correlation JSON, overrides the config");
  smp->add_option("--eas-erg", eas_erg, "also write the adjusted spectra of this EAS");
  smp->add_option("--samples", samples, "realizations")->capture_default_str()->check(CLI::PositiveNumber);
  add_common(smp);

  auto* dec = app.add_subcommand("decompose", "split residuals into dc0, dB and dWS");
  dec->add_option("--residuals", residuals, "residual CSV")->required();
  dec->add_option("--period", period, "single period (default: all)");
  dec->add_option("--bins-axis", bins_axis, "magnitude | r_rup | vs30");
  dec->add_option("--bins", bins, "bin edges")->delimiter(',');
  add_common(dec);

  auto* hz = app.add_subcommand("hazard", "logic-tree hazard curves");
  hz->add_option("--scenarios", hazard_scn, "scenario rates JSON")->required();
  hz->add_option("--branches", branches, "logic-tree branches JSON")->required();
  add_common(hz);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorKind::validation);
  }

  try {
    if (*psa) {
      cmd_psa(common, eas, scenario);
    } else if (*ext) {
      cmd_extrapolate(common, eas, scenario);
    } else if (*fn) {
      if (!eas_nerg && !field) throw ValidationError("fnerg needs --eas-nerg or --field");
      cmd_fnerg(common, eas, eas_nerg, field, correlation, scenario, samples);
    } else if (*smp) {
      cmd_sample(common, *field, correlation, eas_erg, samples);
    } else if (*dec) {
      cmd_decompose(common, residuals, period, bins_axis, bins);
    } else if (*hz) {
      cmd_hazard(common, hazard_scn, branches);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::numerical);
  }
  return 0;
}

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nergpsa/hazard.hpp"
#include "nergpsa/nonergodic.hpp"
#include "nergpsa/residuals.hpp"
#include "nergpsa/rvt_engine.hpp"

namespace nergpsa::io {

inline constexpr const char* kToolVersion = "1.0.0";

// ---- spectra -------------------------------------------------------------
// frequency_hz,eas
EasSpectrum read_eas_csv(const std::string& path);
std::string eas_csv_text(const EasSpectrum& spec);
void write_eas_csv(const std::string& path, const EasSpectrum& spec);

// {"magnitude":7,"r_rup_km":30,"vs30_ms":400,"site_class":0,
//  "stress_drop_bar":100,"beta_kms":3.2,"kappa_s":0.03,
//  "event":[lat,lon],"site":[lat,lon]}
Scenario read_scenario_json(const std::string& path);
Scenario parse_scenario_json(const std::string& text, const std::string& origin);

// period_s,psa,m0,delta,n_z,pf,d_gm,d_rms
std::string psa_csv_text(const PsaSpectrum& psa);
void write_psa_csv(const std::string& path, const PsaSpectrum& psa);

// ---- non-ergodic ----------------------------------------------------------
// frequency_hz,mean_ln,sd_ln
NonErgodicField read_field_csv(const std::string& path,
                               CorrelationModel corr = CorrelationModel{});
CorrelationModel read_correlation_json(const std::string& path);
// period_s,phi0_m1,phi0_m2,tau0_m1,tau0_m2,dc0
AleatoryCoefficients read_aleatory_csv(const std::string& path);

// ---- residuals --------------------------------------------------------------
// event_id,station_id,magnitude,r_rup_km,vs30_ms,period_s,residual_ln
ResidualTable read_residuals_csv(const std::string& path);

// ---- configuration ----------------------------------------------------------
struct RunConfig {
  RvtConfig rvt;
  CorrelationModel correlation;
  std::optional<std::vector<double>> hazard_levels;
  HazardOptions hazard;
  std::string canonical_json;  // normalized text used for the digest
};

// Missing file path -> defaults with the shipped coefficient files. Relative
// paths inside the config resolve against the config file's directory.
RunConfig load_run_config(const std::optional<std::string>& path);

// ---- hazard -----------------------------------------------------------------
struct HazardInputs {
  double period = 0.0;
  std::vector<ScenarioRate> scenarios;
};
HazardInputs read_hazard_scenarios_json(const std::string& path);

struct BackboneSpec {
  std::optional<std::vector<double>> median_ln;  // per scenario, else the scenario's own
  std::optional<AleatoryCoefficients> aleatory;  // else the scenario sigma
};

struct BranchSet {
  LogicTree tree;
  std::vector<std::string> backbone_names;  // aligned with tree.branches
  std::vector<std::vector<double>> fnerg;   // per branch, per scenario (0 when absent)
  std::vector<std::pair<std::string, BackboneSpec>> backbones;
};
BranchSet read_branches_json(const std::string& path, const HazardInputs& inputs);

// Scenario list of one branch after applying backbone, F_nerg and δc0.
std::vector<ScenarioRate> branch_scenarios(const HazardInputs& inputs, const BranchSet& set,
                                           std::size_t branch);

// level_g,mean,median,p02,p16,p84,p98
std::string hazard_csv_text(const HazardAggregate& agg);
void write_hazard_csv(const std::string& path, const HazardAggregate& agg);

// ---- provenance ---------------------------------------------------------------
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);
std::string file_digest(const std::string& path);

struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::string config_digest;
  std::optional<std::uint64_t> seed;
  bool seed_generated = false;
  std::string tool_version = kToolVersion;
  std::string timestamp;  // UTC ISO-8601
  std::string tolerances_json;
  std::vector<std::pair<std::string, std::string>> outputs;  // file name, digest
};

void write_manifest(const std::string& path, const RunManifest& m);
std::string utc_timestamp();

// Writes text atomically enough for CLI use; IoError on failure.
void write_text(const std::string& path, const std::string& content);

}  // namespace nergpsa::io

#include "nergpsa/io.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "nergpsa/csv.hpp"
#include "nergpsa/errors.hpp"

namespace nergpsa::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_file(const std::string& path) {
  const auto text = slurp(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": invalid JSON: " + e.what());
  }
}

template <class T>
T get_field(const json& j, const char* key, const std::string& origin) {
  if (!j.contains(key)) throw ValidationError(origin + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(origin + ": field '" + key + "' has the wrong type");
  }
}

template <class T>
std::optional<T> opt_field(const json& j, const char* key, const std::string& origin) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_field<T>(j, key, origin);
}

std::string resolve(const std::string& base_dir, const std::string& p) {
  const fs::path path(p);
  if (path.is_absolute() || base_dir.empty()) return path.string();
  return (fs::path(base_dir) / path).lexically_normal().string();
}

// Re-raises invariant failures with the file (and row) that caused them.
template <class F>
auto with_origin(const std::string& origin, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(origin + ": " + e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Spectra

EasSpectrum read_eas_csv(const std::string& path) {
  const auto t = csv::read(path, {"frequency_hz", "eas"});
  std::vector<double> f;
  std::vector<double> a;
  for (const auto& row : t.rows) {
    const double fi = t.number(row, 0);
    const double ai = t.number(row, 1);
    if (!(fi > 0.0)) throw ValidationError(t.where(row, 0) + ": frequencies must be > 0");
    if (!f.empty() && !(fi > f.back())) {
      throw ValidationError(t.where(row, 0) + ": frequencies must be strictly ascending");
    }
    if (ai < 0.0) throw ValidationError(t.where(row, 1) + ": eas amplitudes must be >= 0");
    f.push_back(fi);
    a.push_back(ai);
  }
  return with_origin(path, [&] { return EasSpectrum(FrequencyGrid(std::move(f)), std::move(a)); });
}

std::string eas_csv_text(const EasSpectrum& spec) {
  std::string out = "frequency_hz,eas\n";
  for (std::size_t i = 0; i < spec.size(); ++i) {
    out += csv::format(spec.freqs()[i]) + "," + csv::format(spec.amps()[i]) + "\n";
  }
  return out;
}

void write_eas_csv(const std::string& path, const EasSpectrum& spec) {
  write_text(path, eas_csv_text(spec));
}

Scenario parse_scenario_json(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(origin + ": invalid JSON: " + e.what());
  }
  Scenario s;
  s.magnitude = get_field<double>(j, "magnitude", origin);
  s.r_rup_km = get_field<double>(j, "r_rup_km", origin);
  s.vs30_ms = get_field<double>(j, "vs30_ms", origin);
  s.site_class = opt_field<int>(j, "site_class", origin).value_or(0);
  s.stress_drop_bar = opt_field<double>(j, "stress_drop_bar", origin);
  s.beta_kms = opt_field<double>(j, "beta_kms", origin).value_or(3.2);
  s.kappa_s = opt_field<double>(j, "kappa_s", origin);
  if (auto e = opt_field<std::vector<double>>(j, "event", origin); e && e->size() == 2) {
    s.event_coords = std::make_pair((*e)[0], (*e)[1]);
  }
  if (auto e = opt_field<std::vector<double>>(j, "site", origin); e && e->size() == 2) {
    s.site_coords = std::make_pair((*e)[0], (*e)[1]);
  }
  with_origin(origin, [&] { s.validate(); });
  return s;
}

Scenario read_scenario_json(const std::string& path) {
  return parse_scenario_json(slurp(path), path);
}

std::string psa_csv_text(const PsaSpectrum& psa) {
  std::string out = "period_s,psa,m0,delta,n_z,pf,d_gm,d_rms\n";
  for (const auto& d : psa.diagnostics) {
    out += csv::format(d.period) + "," + csv::format(d.psa) + "," + csv::format(d.m0) + "," +
           csv::format(d.delta) + "," + csv::format(d.n_z) + "," + csv::format(d.pf) + "," +
           csv::format(d.d_gm) + "," + csv::format(d.d_rms) + "\n";
  }
  return out;
}

void write_psa_csv(const std::string& path, const PsaSpectrum& psa) {
  write_text(path, psa_csv_text(psa));
}

// ---------------------------------------------------------------------------
// Non-ergodic inputs

NonErgodicField read_field_csv(const std::string& path, CorrelationModel corr) {
  const auto t = csv::read(path, {"frequency_hz", "mean_ln", "sd_ln"});
  std::vector<double> f;
  NonErgodicField field;
  for (const auto& row : t.rows) {
    const double fi = t.number(row, 0);
    if (!(fi > 0.0)) throw ValidationError(t.where(row, 0) + ": frequencies must be > 0");
    if (!f.empty() && !(fi > f.back())) {
      throw ValidationError(t.where(row, 0) + ": frequencies must be strictly ascending");
    }
    const double sd = t.number(row, 2);
    if (sd < 0.0) throw ValidationError(t.where(row, 2) + ": sd_ln must be >= 0");
    f.push_back(fi);
    field.mean_ln.push_back(t.number(row, 1));
    field.sd_ln.push_back(sd);
  }
  field.grid = with_origin(path, [&] { return FrequencyGrid(std::move(f)); });
  field.correlation = corr;
  return field;
}

CorrelationModel read_correlation_json(const std::string& path) {
  return with_origin(path, [&] { return CorrelationModel::from_json_text(slurp(path)); });
}

AleatoryCoefficients read_aleatory_csv(const std::string& path) {
  const auto t =
      csv::read(path, {"period_s", "phi0_m1", "phi0_m2", "tau0_m1", "tau0_m2", "dc0"});
  AleatoryCoefficients c;
  for (const auto& row : t.rows) {
    const double p = t.number(row, 0);
    if (!c.periods.empty() && !(p > c.periods.back())) {
      throw ValidationError(t.where(row, 0) + ": periods must be strictly ascending");
    }
    for (std::size_t k = 1; k <= 4; ++k) {
      if (!(t.number(row, k) > 0.0)) {
        throw ValidationError(t.where(row, k) + ": " + t.header[k] + " must be > 0");
      }
    }
    c.periods.push_back(p);
    c.phi0_m1.push_back(t.number(row, 1));
    c.phi0_m2.push_back(t.number(row, 2));
    c.tau0_m1.push_back(t.number(row, 3));
    c.tau0_m2.push_back(t.number(row, 4));
    c.dc0.push_back(t.number(row, 5));
  }
  with_origin(path, [&] { c.validate(); });
  return c;
}

// ---------------------------------------------------------------------------
// Residuals

ResidualTable read_residuals_csv(const std::string& path) {
  const auto t = csv::read(path, {"event_id", "station_id", "magnitude", "r_rup_km", "vs30_ms",
                                  "period_s", "residual_ln"});
  ResidualTable tbl;
  for (const auto& row : t.rows) {
    ResidualRow r;
    r.event_id = t.text(row, 0);
    r.station_id = t.text(row, 1);
    if (r.event_id.empty()) throw ValidationError(t.where(row, 0) + ": event_id is empty");
    r.magnitude = t.number(row, 2);
    r.r_rup_km = t.number(row, 3);
    r.vs30_ms = t.number(row, 4);
    r.period = t.number(row, 5);
    r.residual = t.number(row, 6);
    if (r.r_rup_km < 0.0) throw ValidationError(t.where(row, 3) + ": r_rup_km must be >= 0");
    if (!(r.vs30_ms > 0.0)) throw ValidationError(t.where(row, 4) + ": vs30_ms must be > 0");
    if (!(r.period > 0.0)) throw ValidationError(t.where(row, 5) + ": period_s must be > 0");
    tbl.push_back(std::move(r));
  }
  if (tbl.empty()) throw ValidationError(path + ": no residual rows");
  return tbl;
}

// ---------------------------------------------------------------------------
// Configuration

RunConfig load_run_config(const std::optional<std::string>& path) {
  const std::string origin = path ? *path : std::string("<defaults>");
  json j = json::object();
  std::string base_dir;
  if (path) {
    j = parse_json_file(*path);
    if (!j.is_object()) throw ValidationError(origin + ": configuration must be a JSON object");
    base_dir = fs::path(*path).parent_path().string();
  }
  const std::string data_dir = NERGPSA_DATA_DIR;

  RunConfig rc;
  auto& cfg = rc.rvt;
  json resolved = json::object();

  cfg.damping = opt_field<double>(j, "damping", origin).value_or(0.05);
  if (j.contains("periods")) {
    const auto& p = j["periods"];
    if (p.is_array()) {
      cfg.periods = get_field<std::vector<double>>(j, "periods", origin);
    } else if (p.is_object()) {
      const double lo = opt_field<double>(p, "min", origin).value_or(0.01);
      const double hi = opt_field<double>(p, "max", origin).value_or(10.0);
      const double ppd = opt_field<double>(p, "per_decade", origin).value_or(20.0);
      const auto g = with_origin(origin, [&] { return FrequencyGrid::per_decade(lo, hi, ppd); });
      cfg.periods.assign(g.freqs().begin(), g.freqs().end());
    } else {
      throw ValidationError(origin + ": 'periods' must be an array or {min,max,per_decade}");
    }
  }

  const json dur = j.value("duration", json::object());
  const auto source = opt_field<std::string>(dur, "source", origin).value_or("as96");
  cfg.duration_interval = opt_field<double>(dur, "interval", origin).value_or(0.85);
  if (source == "user") {
    cfg.duration_source = DurationSource::user;
    cfg.user_d_gm = get_field<double>(dur, "value_s", origin);
  } else if (source == "as96") {
    cfg.duration_source = DurationSource::as96;
    const auto file = resolve(base_dir, opt_field<std::string>(dur, "as96_file", origin)
                                            .value_or(data_dir + "/as96_coefficients.json"));
    cfg.as96 = As96Coefficients::load(file);
    resolved["as96_file"] = file_digest(file);
  } else {
    throw ValidationError(origin + ": duration.source must be 'as96' or 'user'");
  }

  const json rms = j.value("rms_duration", json::object());
  const auto rms_model = opt_field<std::string>(rms, "model", origin).value_or("oscillator_correction");
  if (rms_model == "bt15") {
    const auto file = resolve(base_dir, get_field<std::string>(rms, "table_file", origin));
    cfg.rms_model = RmsDurationModel::bt15(Bt15Table::load(file));
    resolved["bt15_file"] = file_digest(file);
  } else if (rms_model != "oscillator_correction") {
    throw ValidationError(origin + ": rms_duration.model must be 'oscillator_correction' or 'bt15'");
  }

  const json ex = j.value("extrapolation", json::object());
  cfg.extrapolate = opt_field<bool>(ex, "enabled", origin).value_or(true);
  cfg.f_low_target = opt_field<double>(ex, "f_low_hz", origin).value_or(0.01);
  cfg.f_high_target = opt_field<double>(ex, "f_high_hz", origin).value_or(100.0);
  {
    const auto file = resolve(base_dir, opt_field<std::string>(ex, "stress_drop_file", origin)
                                            .value_or(data_dir + "/stress_drop_table.json"));
    cfg.stress_table = StressDropTable::load(file);
    resolved["stress_drop_file"] = file_digest(file);
  }

  cfg.bandwidth_exponent = opt_field<double>(j, "bandwidth_exponent", origin).value_or(0.2);
  const json pf = j.value("peak_factor", json::object());
  cfg.pf.abs_tolerance = opt_field<double>(pf, "abs_tolerance", origin).value_or(1e-13);
  cfg.pf.rel_tolerance = opt_field<double>(pf, "rel_tolerance", origin).value_or(1e-12);

  if (j.contains("correlation")) {
    rc.correlation = with_origin(
        origin, [&] { return CorrelationModel::from_json_text(j["correlation"].dump()); });
  }

  const json hz = j.value("hazard", json::object());
  rc.hazard_levels = opt_field<std::vector<double>>(hz, "levels", origin);
  rc.hazard.truncation_sigma = opt_field<double>(hz, "truncation_sigma", origin);

  with_origin(origin, [&] { cfg.validate(); });

  json canon = j;
  canon["_resolved_files"] = resolved;
  rc.canonical_json = canon.dump();
  return rc;
}

// ---------------------------------------------------------------------------
// Hazard inputs

HazardInputs read_hazard_scenarios_json(const std::string& path) {
  const auto j = parse_json_file(path);
  HazardInputs in;
  in.period = get_field<double>(j, "period_s", path);
  if (!(in.period > 0.0)) throw ValidationError(path + ": period_s must be > 0");
  const auto arr = j.value("scenarios", json::array());
  if (!arr.is_array() || arr.empty()) throw ValidationError(path + ": 'scenarios' must be a nonempty array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& s = arr[i];
    const std::string origin = path + ": scenarios[" + std::to_string(i) + "]";
    ScenarioRate sr;
    sr.id = opt_field<std::string>(s, "id", origin).value_or("s" + std::to_string(i));
    sr.annual_rate = get_field<double>(s, "rate", origin);
    sr.scenario = parse_scenario_json(s.dump(), origin);
    sr.median_ln = get_field<double>(s, "median_ln_psa", origin);
    sr.sigma = opt_field<double>(s, "sigma", origin).value_or(0.0);
    if (!(sr.annual_rate > 0.0)) throw ValidationError(origin + ": rate must be > 0");
    if (sr.sigma < 0.0) throw ValidationError(origin + ": sigma must be > 0");
    in.scenarios.push_back(std::move(sr));
  }
  return in;
}

BranchSet read_branches_json(const std::string& path, const HazardInputs& inputs) {
  const auto j = parse_json_file(path);
  const std::string base_dir = fs::path(path).parent_path().string();
  BranchSet set;

  std::map<std::string, std::size_t> scenario_index;
  for (std::size_t i = 0; i < inputs.scenarios.size(); ++i) {
    scenario_index[inputs.scenarios[i].id] = i;
  }
  const auto per_scenario = [&](const json& obj, const std::string& origin) {
    std::vector<double> v(inputs.scenarios.size(), 0.0);
    for (const auto& [key, val] : obj.items()) {
      const auto it = scenario_index.find(key);
      if (it == scenario_index.end()) {
        throw ValidationError(origin + ": unknown scenario id '" + key + "'");
      }
      if (!val.is_number()) throw ValidationError(origin + ": value for '" + key + "' must be a number");
      v[it->second] = val.get<double>();
    }
    return v;
  };

  const auto backbones = j.value("backbones", json::object());
  for (const auto& [name, b] : backbones.items()) {
    const std::string origin = path + ": backbones." + name;
    BackboneSpec spec;
    if (b.contains("median_ln_psa")) {
      const auto& m = b["median_ln_psa"];
      for (const auto& s : inputs.scenarios) {
        if (!m.contains(s.id)) {
          throw ValidationError(origin + ": median_ln_psa lacks scenario '" + s.id + "'");
        }
      }
      spec.median_ln = per_scenario(m, origin + ".median_ln_psa");
    }
    if (auto f = opt_field<std::string>(b, "aleatory_file", origin)) {
      spec.aleatory = read_aleatory_csv(resolve(base_dir, *f));
    }
    set.backbones.emplace_back(name, std::move(spec));
  }

  const auto arr = j.value("branches", json::array());
  if (!arr.is_array() || arr.empty()) throw ValidationError(path + ": 'branches' must be a nonempty array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& b = arr[i];
    const std::string origin = path + ": branches[" + std::to_string(i) + "]";
    LogicTreeBranch br;
    br.weight = get_field<double>(b, "weight", origin);
    br.backbone = opt_field<std::string>(b, "backbone", origin).value_or("");
    br.realization = opt_field<std::size_t>(b, "realization", origin);
    if (!br.backbone.empty()) {
      const bool known = std::any_of(set.backbones.begin(), set.backbones.end(),
                                     [&](const auto& p) { return p.first == br.backbone; });
      if (!known) throw ValidationError(origin + ": unknown backbone '" + br.backbone + "'");
    }
    set.fnerg.push_back(per_scenario(b.value("fnerg", json::object()), origin + ".fnerg"));
    set.backbone_names.push_back(br.backbone);
    set.tree.branches.push_back(std::move(br));
  }
  with_origin(path, [&] { set.tree.validate(); });
  return set;
}

std::vector<ScenarioRate> branch_scenarios(const HazardInputs& inputs, const BranchSet& set,
                                           std::size_t branch) {
  const BackboneSpec* bb = nullptr;
  for (const auto& [name, spec] : set.backbones) {
    if (name == set.backbone_names.at(branch)) bb = &spec;
  }
  std::vector<ScenarioRate> out = inputs.scenarios;
  for (std::size_t s = 0; s < out.size(); ++s) {
    auto& sr = out[s];
    if (bb && bb->median_ln) sr.median_ln = (*bb->median_ln)[s];
    sr.median_ln += set.fnerg.at(branch)[s];
    if (bb && bb->aleatory) {
      sr.median_ln += bb->aleatory->dc0_at(inputs.period);
      sr.sigma = aleatory_sigma(sr.scenario.magnitude, inputs.period, *bb->aleatory).sigma0;
    }
    if (!(sr.sigma > 0.0)) {
      throw ValidationError("scenario '" + sr.id +
                            "' has no sigma and branch backbone provides no aleatory table");
    }
  }
  return out;
}

std::string hazard_csv_text(const HazardAggregate& agg) {
  std::string out = "level_g,mean,median,p02,p16,p84,p98\n";
  for (std::size_t i = 0; i < agg.levels.size(); ++i) {
    out += csv::format(agg.levels[i]) + "," + csv::format(agg.mean[i]) + "," +
           csv::format(agg.median[i]) + "," + csv::format(agg.p02[i]) + "," +
           csv::format(agg.p16[i]) + "," + csv::format(agg.p84[i]) + "," +
           csv::format(agg.p98[i]) + "\n";
  }
  return out;
}

void write_hazard_csv(const std::string& path, const HazardAggregate& agg) {
  write_text(path, hazard_csv_text(agg));
}

// ---------------------------------------------------------------------------
// Provenance

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string file_digest(const std::string& path) { return "fnv1a64:" + hex64(fnv1a64(slurp(path))); }

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const std::string& path, const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["inputs"] = m.inputs;
  j["config_digest"] = m.config_digest;
  if (m.seed) {
    j["seed"] = *m.seed;
    j["seed_generated"] = m.seed_generated;
  } else {
    j["seed"] = nullptr;
  }
  j["tool_version"] = m.tool_version;
  j["timestamp"] = m.timestamp;
  j["tolerances"] = m.tolerances_json.empty() ? json::object() : json::parse(m.tolerances_json);
  json outs = json::object();
  for (const auto& [name, digest] : m.outputs) outs[name] = digest;
  j["outputs"] = outs;
  write_text(path, j.dump(2) + "\n");
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace nergpsa::io

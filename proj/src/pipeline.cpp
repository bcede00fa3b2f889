// Copyright 2026 The dutem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dutem/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <omp.h>
#include <set>

#include "dutem/analysis.hpp"
#include "dutem/error.hpp"
#include "dutem/exact_sim.hpp"
#include "dutem/learning.hpp"
#include "dutem/tn.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace dutem {

Profile profile_from_string(const std::string& s) {
  if (s == "desk") return Profile::desk;
  if (s == "large") return Profile::large;
  throw ConfigError("--profile", "expected desk or large, got '" + s + "'");
}

namespace {

const json* find(const json& j, const std::string& path) {
  const json::json_pointer ptr(path);
  return j.contains(ptr) ? &j.at(ptr) : nullptr;
}

const json& require(const json& j, const std::string& path) {
  const json* v = find(j, path);
  if (!v) throw ConfigError(path, "required field is missing");
  return *v;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
  return x;
}

std::size_t as_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(path, "expected a non-negative integer");
  return v.get<std::size_t>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
  return v.get<bool>();
}

template <class F>
void optional_field(const json& j, const std::string& path, F&& set) {
  if (const json* v = find(j, path)) set(*v, path);
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  const json* v = path.empty() ? &j : find(j, path);
  if (!v) return;
  if (!v->is_object()) throw ConfigError(path.empty() ? "/" : path, "expected an object");
  for (const auto& [k, _] : v->items()) {
    if (!allowed.count(k)) throw ConfigError(path + "/" + k, "unknown field");
  }
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream f(p);
  if (!f) throw Error("cannot open " + p.string() + " for writing");
  f << std::setw(2) << j << '\n';
}

json read_json(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw Error("missing artifact " + p.string() + "; run the earlier stages first");
  return json::parse(f);
}

void record_stage(const PipelineConfig& cfg, const fs::path& out, const std::string& stage,
                  const std::vector<std::string>& files) {
  const fs::path mp = out / "manifest.json";
  json m = fs::exists(mp) ? read_json(mp) : json::object();
  m["version"] = kVersion;
  m["seed"] = cfg.seed;
  m["profile"] = cfg.profile == Profile::desk ? "desk" : "large";
  m["threads"] = omp_get_max_threads();
  m["config"] = cfg.raw;
  m["stages"][stage] = files;
  write_json(mp, m);
}

ShotBackend resolve_backend(const PipelineConfig& cfg) {
  if (cfg.backend == "density") return ShotBackend::density;
  if (cfg.backend == "trajectory") return ShotBackend::trajectory;
  return cfg.n_qubits <= kDensityMatrixCap ? ShotBackend::density : ShotBackend::trajectory;
}

BrickworkCircuit light_cone_circuit(const PipelineConfig& cfg, std::size_t t) {
  return build_brickwork(cfg.params(t), {.state_prep_layer = true});
}

PauliString signal_observable(const PipelineConfig& cfg, std::size_t t) {
  return PauliString::single(cfg.n_qubits, t, PauliLetter::X);
}

tn::CompressionPolicy tem_policy(const PipelineConfig& cfg) {
  return tn::CompressionPolicy::relative_cutoff(cfg.cutoff, cfg.chi);
}

NoiseModel load_model(const fs::path& p, std::size_t n) { return noise_model_from_json(read_json(p), n); }

struct MitigationOutput {
  CsvTable decay = decay_curve_table();
  CsvTable truncation{{"t", "max_bond", "max_discarded", "total_discarded"}, {}};
};

MitigationOutput mitigate_all(const PipelineConfig& cfg, const fs::path& out) {
  const std::size_t n = cfg.n_qubits;
  const NoiseModel truth = load_model(out / "truth_noise.json", n);
  const fs::path learned_path = out / "learned_noise.json";
  const NoiseModel model = fs::exists(learned_path) ? load_model(learned_path, n) : truth;
  std::vector<double> cal;
  if (cfg.trex) cal = read_json(out / "trex_calibration.json").at("value").get<std::vector<double>>();
  MitigationOutput res;
  for (std::size_t t = 0; t <= cfg.t_max; ++t) {
    const BrickworkCircuit c = light_cone_circuit(cfg, t);
    const PauliString o = signal_observable(cfg, t);
    std::ifstream f(out / shots_file_name(t));
    if (!f) throw Error("missing shot file for t=" + std::to_string(t) + "; run synth first");
    std::size_t file_n = 0;
    const auto shots = read_shots(f, &file_n);
    if (file_n != n) throw ConfigError("/model/n_qubits", "shot file was written for a different qubit count");
    const auto dists = signal_biased_distributions(n, t);
    const Estimate raw = estimate_pauli(shots, o, dists, cal);
    tn::TemOptions topts;
    topts.policy = tem_policy(cfg);
    if (cfg.light_cone) topts.light_cone_site = t;
    const tn::TemMap map = tn::build_tem_map(c, model, topts);
    const Estimate mit = tn::mitigated_estimate(shots, map, o, dists, cal);
    const double exact = n <= kStatevectorCap ? statevector_expectation(c, o) : analytic_correlator(cfg.h, t, t);
    const double noisy = n <= kDensityMatrixCap ? noisy_expectation_dm(c, truth, o)
                                                : tn::heisenberg_expectation(c, o, tem_policy(cfg), &truth);
    res.decay.add({static_cast<double>(t), exact, noisy, raw.value, raw.stderr_, mit.value, mit.stderr_});
    res.truncation.add({static_cast<double>(t), static_cast<double>(map.mpo.max_bond()), map.log.max_discarded(),
                        map.log.total_discarded()});
  }
  return res;
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j, Profile profile) {
  if (!j.is_object()) throw ConfigError("/", "configuration must be a JSON object");
  check_keys(j, "", {"model", "noise", "measurement", "learning", "tn", "sweep", "seed"});
  check_keys(j, "/model", {"n_qubits", "J", "b", "h", "t_max"});
  check_keys(j, "/noise", {"file", "total_rate", "weight2_scale", "readout_error"});
  check_keys(j, "/measurement", {"settings", "shots", "backend", "trex", "trex_shots"});
  check_keys(j, "/learning", {"enabled", "depths", "settings", "shots", "clifford_shots", "untuned_split_weight"});
  check_keys(j, "/tn", {"chi", "cutoff", "light_cone", "convergence_chis"});
  check_keys(j, "/sweep", {"b_offsets"});
  PipelineConfig c;
  c.raw = j;
  c.profile = profile;
  if (profile == Profile::large) {
    c.settings = 1024;
    c.shots = 1024;
    c.trex_shots = 1 << 16;
    c.chi = 128;
    c.convergence_chis = {8, 16, 32, 64, 128};
  }
  c.n_qubits = as_count(require(j, "/model/n_qubits"), "/model/n_qubits");
  c.J = as_number(require(j, "/model/J"), "/model/J");
  c.b = as_number(require(j, "/model/b"), "/model/b");
  c.h = as_number(require(j, "/model/h"), "/model/h");
  c.t_max = as_count(require(j, "/model/t_max"), "/model/t_max");
  c.seed = as_count(require(j, "/seed"), "/seed");
  if (c.n_qubits < 3 || c.n_qubits % 2 == 0) throw ConfigError("/model/n_qubits", "must be odd and at least 3");
  if (2 * c.t_max > c.n_qubits - 1) throw ConfigError("/model/t_max", "must not exceed (n_qubits - 1) / 2");
  if (const json* f = find(j, "/noise/file")) {
    if (!f->is_string()) throw ConfigError("/noise/file", "expected a path");
    c.noise_file = f->get<std::string>();
  } else {
    c.noise_total_rate = as_number(require(j, "/noise/total_rate"), "/noise/total_rate");
    if (c.noise_total_rate < 0) throw ConfigError("/noise/total_rate", "must be non-negative");
  }
  c.readout_error = as_number(require(j, "/noise/readout_error"), "/noise/readout_error");
  if (c.readout_error < 0 || c.readout_error >= 0.5) throw ConfigError("/noise/readout_error", "must lie in [0, 0.5)");
  optional_field(j, "/noise/weight2_scale", [&](const json& v, const std::string& p) {
    c.noise_weight2_scale = as_number(v, p);
    if (c.noise_weight2_scale < 0) throw ConfigError(p, "must be non-negative");
  });
  optional_field(j, "/measurement/settings", [&](const json& v, const std::string& p) { c.settings = as_count(v, p); });
  optional_field(j, "/measurement/shots", [&](const json& v, const std::string& p) { c.shots = as_count(v, p); });
  optional_field(j, "/measurement/trex", [&](const json& v, const std::string& p) { c.trex = as_bool(v, p); });
  optional_field(j, "/measurement/trex_shots", [&](const json& v, const std::string& p) { c.trex_shots = as_count(v, p); });
  optional_field(j, "/measurement/backend", [&](const json& v, const std::string& p) {
    if (!v.is_string()) throw ConfigError(p, "expected a string");
    c.backend = v.get<std::string>();
    if (c.backend != "auto" && c.backend != "density" && c.backend != "trajectory") {
      throw ConfigError(p, "expected auto, density or trajectory");
    }
  });
  if (c.settings == 0 || c.shots == 0) throw ConfigError("/measurement", "settings and shots must be positive");
  if (c.trex && c.trex_shots < 2) throw ConfigError("/measurement/trex_shots", "must be at least 2");
  optional_field(j, "/learning/enabled", [&](const json& v, const std::string& p) { c.learn = as_bool(v, p); });
  optional_field(j, "/learning/depths", [&](const json& v, const std::string& p) {
    if (!v.is_array()) throw ConfigError(p, "expected an array of even depths");
    c.learn_depths.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::size_t d = as_count(v[i], p + "/" + std::to_string(i));
      if (d % 2) throw ConfigError(p + "/" + std::to_string(i), "cycle-benchmark depths must be even");
      c.learn_depths.push_back(d);
    }
    if (c.learn_depths.size() < 3 || std::find(c.learn_depths.begin(), c.learn_depths.end(), 0) == c.learn_depths.end()) {
      throw ConfigError(p, "need at least 3 depths including 0");
    }
  });
  optional_field(j, "/learning/settings", [&](const json& v, const std::string& p) { c.learn_settings = as_count(v, p); });
  optional_field(j, "/learning/shots", [&](const json& v, const std::string& p) { c.learn_shots = as_count(v, p); });
  optional_field(j, "/learning/clifford_shots",
                 [&](const json& v, const std::string& p) { c.clifford_shots = as_count(v, p); });
  optional_field(j, "/learning/untuned_split_weight", [&](const json& v, const std::string& p) {
    c.untuned_split_weight = as_number(v, p);
    if (c.untuned_split_weight <= 0) throw ConfigError(p, "must be positive");
  });
  optional_field(j, "/tn/chi", [&](const json& v, const std::string& p) {
    c.chi = as_count(v, p);
    if (c.chi == 0) throw ConfigError(p, "must be positive");
  });
  optional_field(j, "/tn/cutoff", [&](const json& v, const std::string& p) {
    c.cutoff = as_number(v, p);
    if (c.cutoff < 0) throw ConfigError(p, "must be non-negative");
  });
  optional_field(j, "/tn/light_cone", [&](const json& v, const std::string& p) { c.light_cone = as_bool(v, p); });
  optional_field(j, "/tn/convergence_chis", [&](const json& v, const std::string& p) {
    if (!v.is_array() || v.empty()) throw ConfigError(p, "expected a non-empty array");
    c.convergence_chis.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::size_t x = as_count(v[i], p + "/" + std::to_string(i));
      if (x == 0) throw ConfigError(p + "/" + std::to_string(i), "must be positive");
      c.convergence_chis.push_back(x);
    }
  });
  optional_field(j, "/sweep/b_offsets", [&](const json& v, const std::string& p) {
    if (!v.is_array()) throw ConfigError(p, "expected an array");
    for (std::size_t i = 0; i < v.size(); ++i) c.b_offsets.push_back(as_number(v[i], p + "/" + std::to_string(i)));
  });
  return c;
}

PipelineConfig PipelineConfig::from_file(const std::string& path, Profile profile) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path, "cannot open configuration file");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
  return from_json(j, profile);
}

KickedIsingParams PipelineConfig::params(std::size_t t) const { return {J, b, h, n_qubits, t}; }

NoiseModel random_sparse_model(std::size_t n, double total_rate, double weight2_scale, std::uint64_t seed) {
  const SparseBasis basis(n);
  std::mt19937_64 rng = seed_stream(seed, 0x6e6f697365ULL);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::vector<double> rates;
  double sum = 0;
  for (const auto& p : basis.entries()) {
    rates.push_back(u(rng) * (p.weight() == 1 ? 1.0 : weight2_scale));
    sum += rates.back();
  }
  for (double& r : rates) r = sum > 0 ? r * total_rate / sum : 0.0;
  return {PauliLindbladChannel::sparse(basis, rates, Parity::even), PauliLindbladChannel::sparse(basis, rates, Parity::odd)};
}

std::string shots_file_name(std::size_t t) { return "shots_t" + std::to_string(t) + ".csv"; }

StageStatus stage_synth(const PipelineConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  const std::size_t n = cfg.n_qubits;
  const NoiseModel truth = cfg.noise_file ? noise_model_from_json(read_json(*cfg.noise_file), n)
                                          : random_sparse_model(n, cfg.noise_total_rate, cfg.noise_weight2_scale, cfg.seed);
  write_json(out / "truth_noise.json", noise_model_to_json(truth));
  const ReadoutNoise readout = ReadoutNoise::uniform(n, cfg.readout_error);
  std::vector<std::string> files{"truth_noise.json"};
  if (cfg.trex) {
    std::mt19937_64 rng = seed_stream(cfg.seed, 0x74726578ULL);
    const TrexCalibration cal = calibrate_trex(readout, cfg.trex_shots, rng);
    write_json(out / "trex_calibration.json", {{"value", cal.value}, {"stderr", cal.stderr_}, {"shots", cfg.trex_shots}});
    files.push_back("trex_calibration.json");
  }
  for (std::size_t t = 0; t <= cfg.t_max; ++t) {
    const BrickworkCircuit c = light_cone_circuit(cfg, t);
    const auto dists = signal_biased_distributions(n, t);
    std::mt19937_64 rng = seed_stream(cfg.seed, 1000 + t);
    const auto settings = sample_settings(dists, cfg.settings, rng);
    ShotOptions so;
    so.shots_per_setting = cfg.shots;
    so.backend = resolve_backend(cfg);
    so.trex = cfg.trex;
    so.seed = seed_stream(cfg.seed, 2000 + t)();
    const auto shots = generate_shots(c, truth, readout, settings, so);
    std::ofstream f(out / shots_file_name(t));
    write_shots(f, n, shots);
    files.push_back(shots_file_name(t));
  }
  record_stage(cfg, out, "synth", files);
  return {};
}

StageStatus stage_learn(const PipelineConfig& cfg, const fs::path& out) {
  const std::size_t n = cfg.n_qubits;
  const NoiseModel truth = load_model(out / "truth_noise.json", n);
  StageStatus st;
  if (!cfg.learn) {
    write_json(out / "learned_noise.json", noise_model_to_json(truth));
    write_json(out / "learning_report.json", {{"learned", false}, {"note", "learning disabled; injected model used"}});
    record_stage(cfg, out, "learn", {"learned_noise.json", "learning_report.json"});
    return st;
  }
  LearningOptions lo;
  lo.cycle.depths = cfg.learn_depths;
  lo.cycle.settings = cfg.learn_settings;
  lo.cycle.shots = cfg.learn_shots;
  lo.cycle.readout_error = cfg.readout_error;
  lo.cycle.seed = seed_stream(cfg.seed, 3000)();
  lo.clifford_t_max = cfg.t_max;
  lo.clifford_shots = cfg.clifford_shots;
  lo.untuned_split_weight = cfg.untuned_split_weight;
  const LearningResult lr = learn_noise_model(n, truth, lo);
  json report = lr.report();
  report["learned"] = true;
  for (const auto& s : lr.splits.segments) {
    if (s.violation) {
      st.model_violation = true;
      st.warnings.push_back("Clifford signal at depth " + std::to_string(s.depth) +
                            " outside the reachable fidelity interval; split clamped");
    }
  }
  for (const auto& g : lr.generator_fits) {
    if (!g.converged) st.warnings.push_back("NNLS did not converge in slot " + to_string(g.channel.slot()));
  }
  const ValidationReport vr = validate_model(lr.model, truth, n, {2, 4, 6});
  for (const auto& [family, per_depth] : vr.max_deviation) {
    for (const auto& [d, dev] : per_depth) report["validation"][family][std::to_string(d)] = dev;
  }
  write_json(out / "learned_noise.json", noise_model_to_json(lr.model));
  write_json(out / "symmetric_noise.json", noise_model_to_json(lr.symmetric_model));
  write_json(out / "learning_report.json", report);
  record_stage(cfg, out, "learn", {"learned_noise.json", "symmetric_noise.json", "learning_report.json"});
  return st;
}

StageStatus stage_mitigate(const PipelineConfig& cfg, const fs::path& out) {
  const MitigationOutput m = mitigate_all(cfg, out);
  write_csv((out / "decay.csv").string(), m.decay);
  write_csv((out / "tem_truncation.csv").string(), m.truncation);
  std::vector<double> t, exact, noisy, un, un_se, mit, mit_se;
  for (const auto& r : m.decay.rows) {
    t.push_back(r[0]);
    exact.push_back(r[1]);
    noisy.push_back(r[2]);
    un.push_back(r[3]);
    un_se.push_back(r[4]);
    mit.push_back(r[5]);
    mit_se.push_back(r[6]);
  }
  const RelativeErrors re = relative_error_report(un, mit, noisy, exact);
  CsvTable rel{{"t", "r_u", "r_m"}, {}};
  for (std::size_t i = 0; i < t.size(); ++i) rel.add({t[i], re.r_u[i], re.r_m[i]});
  write_csv((out / "relative_errors.csv").string(), rel);
  StageStatus st;
  json rates;
  rates["theory"] = theory_decay_rate(cfg.h);
  auto fit = [&](const char* name, const std::vector<double>& v, const std::vector<double>& se) {
    try {
      const RateFit f = fit_decay_rate(t, v, se);
      rates[name] = {{"rate", f.rate}, {"stderr", f.stderr_}, {"ci", {f.ci_low, f.ci_high}}, {"flagged", f.flagged}};
    } catch (const InvalidArgument& e) {
      st.warnings.push_back(std::string(name) + " decay fit skipped: " + e.what());
    }
  };
  fit("unmitigated", un, un_se);
  fit("mitigated", mit, mit_se);
  write_json(out / "rates.json", rates);
  record_stage(cfg, out, "mitigate", {"decay.csv", "tem_truncation.csv", "relative_errors.csv", "rates.json"});
  return st;
}

StageStatus stage_simulate(const PipelineConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  const std::size_t t = cfg.t_max;
  const BrickworkCircuit c = light_cone_circuit(cfg, t);
  const PauliString o = signal_observable(cfg, t);
  std::vector<double> chis, values, ent, proj;
  for (std::size_t chi : cfg.convergence_chis) {
    tn::EvolutionResult info;
    const tn::PtmMps x = tn::heisenberg_evolve(c, o, tn::CompressionPolicy::hard_cap(chi), nullptr, &info);
    const tn::PtmMps init = tn::initial_state_ptm(c.initial, c.n_qubits);
    chis.push_back(static_cast<double>(chi));
    values.push_back(x.dot(init));
    double e = 0;
    for (double v : info.max_entropy_per_layer) e = std::max(e, v);
    ent.push_back(e);
    proj.push_back(tn::project_iz(x).max_entropy());
  }
  const tn::ConvergenceReport rep = tn::convergence_report(chis, values, ent, proj);
  CsvTable table = convergence_table();
  for (std::size_t i = 0; i < chis.size(); ++i) {
    table.add({chis[i], values[i], rep.successive_differences[i], rep.delta_chi[i], ent[i], proj[i]});
  }
  write_csv((out / "convergence.csv").string(), table);
  json sim{{"t", t}, {"extrapolated", rep.extrapolated}};
  const std::size_t chi_max = *std::max_element(cfg.convergence_chis.begin(), cfg.convergence_chis.end());
  const tn::StateMps psi = tn::schrodinger_evolve(c, tn::CompressionPolicy::hard_cap(chi_max));
  sim["schrodinger"] = tn::state_expectation(psi, o);
  sim["heisenberg"] = values.back();
  if (cfg.n_qubits <= kStatevectorCap) sim["statevector"] = statevector_expectation(c, o);
  write_json(out / "simulate.json", sim);
  record_stage(cfg, out, "simulate", {"convergence.csv", "simulate.json"});
  return {};
}

StageStatus stage_report(const PipelineConfig& cfg, const fs::path& out) {
  const std::size_t n = cfg.n_qubits;
  const NoiseModel model = load_model(out / "learned_noise.json", n);
  const double q = std::numbers::pi / 4;
  const BrickworkCircuit c = build_brickwork({q, q, 0.0, n, cfg.t_max}, {.state_prep_layer = true});
  const PropagationResult r = pauli_propagation(c, model, signal_observable(cfg, cfg.t_max));
  const double ratio = damping_ratio(r.ideal, r.value);
  write_csv((out / "overheads.csv").string(), overhead_table({ratio}));
  json rep{{"damping_ratio", ratio}, {"clifford_depth", cfg.t_max}};
  const auto o = sampling_overheads(ratio);
  rep["pec_over_tem"] = o.pec_over_tem;
  rep["zne_over_tem"] = o.zne_over_tem;
  if (fs::exists(out / "rates.json")) rep["rates"] = read_json(out / "rates.json");
  write_json(out / "report.json", rep);
  record_stage(cfg, out, "report", {"overheads.csv", "report.json"});
  return {};
}

StageStatus run_pipeline(const PipelineConfig& cfg, const fs::path& out) {
  StageStatus total;
  auto merge = [&](const StageStatus& s) {
    total.model_violation = total.model_violation || s.model_violation;
    total.warnings.insert(total.warnings.end(), s.warnings.begin(), s.warnings.end());
  };
  merge(stage_synth(cfg, out));
  merge(stage_learn(cfg, out));
  merge(stage_mitigate(cfg, out));
  merge(stage_simulate(cfg, out));
  merge(stage_report(cfg, out));
  if (!cfg.b_offsets.empty()) {
    CsvTable sweep{{"b_offset", "b", "t", "exact", "noisy_simulation", "unmitigated", "unmitigated_stderr", "mitigated",
                    "mitigated_stderr"},
                   {}};
    for (std::size_t k = 0; k < cfg.b_offsets.size(); ++k) {
      PipelineConfig sub = cfg;
      sub.b = cfg.b + cfg.b_offsets[k];
      sub.b_offsets.clear();
      const fs::path dir = out / "sweep" / ("b_" + std::to_string(k));
      merge(stage_synth(sub, dir));
      fs::copy_file(out / "learned_noise.json", dir / "learned_noise.json", fs::copy_options::overwrite_existing);
      const MitigationOutput m = mitigate_all(sub, dir);
      for (const auto& r : m.decay.rows) {
        std::vector<double> row{cfg.b_offsets[k], sub.b};
        row.insert(row.end(), r.begin(), r.end());
        sweep.add(row);
      }
    }
    write_csv((out / "sweep.csv").string(), sweep);
    record_stage(cfg, out, "sweep", {"sweep.csv"});
  }
  return total;
}

}  // namespace dutem

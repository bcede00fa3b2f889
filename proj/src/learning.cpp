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

#include "dutem/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "dutem/error.hpp"
#include "dutem/measurement.hpp"

namespace dutem {

namespace {

struct LineFit {
  double intercept = 0, slope = 0, slope_stderr = 0;
};

// Least squares y = a + b x with weights w (all ones for the unweighted case).
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w,
                 bool known_errors) {
  Eigen::Matrix2d ata = Eigen::Matrix2d::Zero();
  Eigen::Vector2d aty = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Eigen::Vector2d row(1.0, x[i]);
    ata += w[i] * row * row.transpose();
    aty += w[i] * y[i] * row;
  }
  const Eigen::Vector2d sol = ata.ldlt().solve(aty);
  LineFit f{sol(0), sol(1), 0};
  const Eigen::Matrix2d cov = ata.inverse();
  double scale = 1.0;
  if (!known_errors) {
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - sol(0) - sol(1) * x[i];
      rss += w[i] * r * r;
    }
    scale = x.size() > 2 ? rss / static_cast<double>(x.size() - 2) : 0.0;
  }
  f.slope_stderr = std::sqrt(std::max(0.0, scale * cov(1, 1)));
  return f;
}

std::pair<double, double> binomial_mean(double exact, std::size_t shots, std::mt19937_64& rng) {
  const double p = std::clamp((1.0 + exact) / 2.0, 0.0, 1.0);
  std::binomial_distribution<long long> bin(static_cast<long long>(shots), p);
  const double s = static_cast<double>(shots);
  const double mean = 2.0 * static_cast<double>(bin(rng)) / s - 1.0;
  const double var = std::max(1.0 - mean * mean, 1.0 / s);
  return {mean, std::sqrt(var / s)};
}

}  // namespace

DecayFit fit_decay(const DecayData& data) {
  const std::size_t m = data.depths.size();
  if (m != data.means.size()) throw SizeMismatch("depths and means differ in length");
  if (!data.stderrs.empty() && data.stderrs.size() != m) throw SizeMismatch("stderrs length mismatch");
  if (m < 3 || std::find(data.depths.begin(), data.depths.end(), 0.0) == data.depths.end()) {
    throw InvalidArgument("decay fit needs at least 3 depths including 0");
  }
  DecayFit fit;
  fit.pauli = data.pauli;
  fit.slot = data.slot;
  fit.depths = data.depths;
  fit.means = data.means;
  fit.dropped.assign(m, false);
  bool known = !data.stderrs.empty();
  for (std::size_t i = 0; known && i < m; ++i) known = data.stderrs[i] > 0;
  std::vector<double> x, y, w;
  for (std::size_t i = 0; i < m; ++i) {
    const double sigma = data.stderrs.empty() ? 0.0 : data.stderrs[i];
    if (data.means[i] <= 3.0 * sigma || data.means[i] <= 0) {
      fit.dropped[i] = true;
      fit.flagged = true;
      continue;
    }
    x.push_back(data.depths[i]);
    y.push_back(std::log(data.means[i]));
    w.push_back(known ? std::pow(data.means[i] / sigma, 2) : 1.0);
  }
  if (x.size() < 2) throw InvalidArgument("decay fit: fewer than 2 points above the noise floor");
  const LineFit lf = fit_line(x, y, w, known);
  fit.spam = std::exp(lf.intercept);
  fit.pair_fidelity = std::exp(lf.slope);
  fit.pair_fidelity_stderr = fit.pair_fidelity * lf.slope_stderr;
  if (fit.pair_fidelity > 1.0) {
    fit.pair_fidelity = 1.0;
    fit.flagged = true;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (fit.dropped[i]) continue;
    const double model = fit.spam * std::pow(fit.pair_fidelity, data.depths[i]);
    fit.residual = std::max(fit.residual, std::abs(model - data.means[i]));
  }
  return fit;
}

std::vector<DecayFit> fit_pair_fidelities(const std::vector<DecayData>& data) {
  std::vector<DecayFit> out(data.size());
  const auto count = static_cast<std::int64_t>(data.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) out[i] = fit_decay(data[i]);
  return out;
}

std::vector<std::vector<PauliLetter>> parallel_eigenstate_settings(std::size_t n) {
  constexpr PauliLetter letters[3] = {PauliLetter::X, PauliLetter::Y, PauliLetter::Z};
  std::vector<std::vector<PauliLetter>> out;
  for (std::size_t k1 = 0; k1 < 3; ++k1) {
    for (std::size_t k0 = 0; k0 < 3; ++k0) {
      std::vector<PauliLetter> s(n);
      for (std::size_t q = 0; q < n; ++q) s[q] = letters[(k0 + k1 * q) % 3];
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::optional<std::size_t> covering_setting(const std::vector<std::vector<PauliLetter>>& settings,
                                            const PauliString& p) {
  for (std::size_t k = 0; k < settings.size(); ++k) {
    if (settings[k].size() != p.n_qubits()) throw SizeMismatch("setting size differs from Pauli size");
    bool ok = true;
    for (std::size_t q : p.support()) ok = ok && settings[k][q] == p.letter(q);
    if (ok) return k;
  }
  return std::nullopt;
}

bool covers_basis(const std::vector<std::vector<PauliLetter>>& settings, const SparseBasis& basis) {
  for (const auto& p : basis.entries())
    if (!covering_setting(settings, p)) return false;
  return true;
}

Layer clifford_layer(std::size_t n, Parity parity) {
  const double q = std::numbers::pi / 4;
  return make_layer(n, parity, two_qubit_block({q, q, 0.0, n, 0}), parity);
}

std::vector<DecayData> synth_cycle_benchmark(const Layer& layer, std::size_t n, const PauliLindbladChannel& truth,
                                             const CycleBenchmarkOptions& opts) {
  if (truth.n_qubits() != n) throw SizeMismatch("truth channel size mismatch");
  if (!layer.clifford) throw NotClifford("cycle benchmarks need a Clifford layer");
  const SparseBasis basis(n);
  const auto settings = parallel_eigenstate_settings(n);
  NoiseModel nm = NoiseModel::noiseless(n);
  nm[layer.noise_slot] = truth;
  const std::size_t total_shots = opts.settings * opts.shots;
  std::vector<DecayData> out(basis.size());
  const auto count = static_cast<std::int64_t>(basis.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    const PauliString& p = basis[i];
    const auto setting = covering_setting(settings, p);
    std::mt19937_64 rng = seed_stream(opts.seed, static_cast<std::uint64_t>(i));
    DecayData d;
    d.pauli = p;
    d.slot = layer.noise_slot;
    const double spam = std::pow(1.0 - 2.0 * opts.readout_error, static_cast<double>(p.weight()));
    for (std::size_t depth : opts.depths) {
      const BrickworkCircuit c = build_cycle_benchmark(layer, n, p, depth);
      const PropagationResult r = pauli_propagation(c, nm, p);
      const double exact = r.value * spam;  // signed
      d.depths.push_back(static_cast<double>(depth));
      if (opts.exact || total_shots == 0) {
        d.means.push_back(exact * r.ideal);
      } else {
        const auto [mean, err] = binomial_mean(exact, total_shots, rng);
        d.means.push_back(mean * r.ideal);
        d.stderrs.push_back(err);
      }
    }
    (void)setting;
    out[i] = std::move(d);
  }
  return out;
}

SlotFidelities::SlotFidelities(Parity slot, const SparseBasis& basis, const CliffordLayer& layer,
                               const std::vector<DecayFit>& fits)
    : slot_(slot), basis_(basis), layer_(layer) {
  if (layer.n_qubits() != basis.n_qubits()) throw SizeMismatch("layer and basis sizes differ");
  std::vector<std::size_t> counts;
  for (const auto& f : fits) {
    if (f.slot != slot) continue;
    const PauliString p = f.pauli.unsigned_copy();
    const PauliString q = layer.conjugate(p).unsigned_copy();
    auto it = index_.find(p);
    if (it == index_.end()) it = index_.find(q);
    if (it != index_.end()) {
      auto& pr = pairs_[it->second];
      const double c = static_cast<double>(counts[it->second]++);
      pr.pair = (pr.pair * c + f.pair_fidelity) / (c + 1.0);
      continue;
    }
    FidelityPair pr;
    const bool p_first = PauliLess{}(p, q) || same_up_to_phase(p, q);
    pr.a = p_first ? p : q;
    pr.b = p_first ? q : p;
    pr.pair = std::min(1.0, f.pair_fidelity);
    index_[pr.a] = pairs_.size();
    index_[pr.b] = pairs_.size();
    pairs_.push_back(pr);
    counts.push_back(1);
  }
}

std::optional<std::pair<std::size_t, bool>> SlotFidelities::find(const PauliString& p) const {
  const auto it = index_.find(p.unsigned_copy());
  if (it == index_.end()) return std::nullopt;
  return std::make_pair(it->second, same_up_to_phase(pairs_[it->second].a, p));
}

std::optional<double> SlotFidelities::fidelity(const PauliString& p) const {
  const auto f = find(p);
  if (!f) return std::nullopt;
  const auto& pr = pairs_[f->first];
  return f->second ? pr.pair * pr.alpha : pr.pair / pr.alpha;
}

std::vector<double> SlotFidelities::basis_alpha() const {
  std::vector<double> out;
  for (const auto& p : basis_.entries()) {
    const auto f = find(p);
    if (!f) throw InvalidArgument("no pair fidelity for " + p.to_sparse_text());
    const double a = pairs_[f->first].alpha;
    out.push_back(f->second ? a : 1.0 / a);
  }
  return out;
}

std::vector<double> SlotFidelities::basis_pair() const {
  std::vector<double> out;
  for (const auto& p : basis_.entries()) {
    const auto f = find(p);
    if (!f) throw InvalidArgument("no pair fidelity for " + p.to_sparse_text());
    out.push_back(pairs_[f->first].pair);
  }
  return out;
}

std::vector<bool> SlotFidelities::basis_tuned() const {
  std::vector<bool> out;
  for (const auto& p : basis_.entries()) {
    const auto f = find(p);
    out.push_back(f && pairs_[f->first].tuned);
  }
  return out;
}

void SlotFidelities::reset_splits() {
  for (auto& p : pairs_) {
    p.alpha = 1;
    p.tuned = false;
  }
}

namespace {

double entry_fidelity(const ContributingFidelity& e, const SlotFidelities& even, const SlotFidelities& odd,
                      const NoiseModel& fallback) {
  const SlotFidelities& s = e.slot == Parity::even ? even : odd;
  if (const auto f = s.fidelity(e.pauli)) return *f;
  return fallback[e.slot].fidelity(e.pauli);
}

}  // namespace

double split_model_prediction(const BrickworkCircuit& c, const PauliString& o, const SlotFidelities& even,
                              const SlotFidelities& odd, const NoiseModel& fallback) {
  const PropagationResult r = pauli_propagation(c, fallback, o);
  double v = r.ideal;
  for (const auto& e : r.path) v *= entry_fidelity(e, even, odd, fallback);
  return v;
}

SplitReport finetune_splits(const std::vector<CliffordPoint>& points, SlotFidelities& even, SlotFidelities& odd,
                            const NoiseModel& fallback, bool strict, double tol) {
  std::vector<const CliffordPoint*> order;
  for (const auto& p : points) order.push_back(&p);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->depth < b->depth; });
  SplitReport report;
  for (const CliffordPoint* pt : order) {
    if (pt->depth == 0) continue;
    const PropagationResult r = pauli_propagation(pt->circuit, fallback, pt->observable);
    if (r.ideal == 0) throw InvalidArgument("Clifford data point has zero ideal value");
    // Net exponent of alpha per untuned pair; constant factors go into k.
    struct Var {
      SlotFidelities* slot;
      std::size_t pair;
      int exponent;  // power of alpha_a
    };
    std::vector<Var> vars;
    double k = 1.0;
    for (const auto& e : r.path) {
      SlotFidelities& s = e.slot == Parity::even ? even : odd;
      const auto f = s.find(e.pauli);
      if (!f || s.pairs()[f->first].tuned || s.pairs()[f->first].self_conjugate() ||
          s.pairs()[f->first].pair >= 1.0) {
        k *= entry_fidelity(e, even, odd, fallback);
        continue;
      }
      k *= s.pairs()[f->first].pair;
      auto it = std::find_if(vars.begin(), vars.end(), [&](const Var& v) { return v.slot == &s && v.pair == f->first; });
      if (it == vars.end()) {
        vars.push_back({&s, f->first, 0});
        it = vars.end() - 1;
      }
      it->exponent += f->second ? 1 : -1;
    }
    // Orient every pair so its net exponent is non-negative: the signal is then
    // non-increasing in delta.
    auto alpha_of = [](const FidelityPair& p, double delta) { return delta * p.alpha_min() + (1 - delta) * p.alpha_max(); };
    auto signal = [&](double delta) {
      double g = k;
      for (const auto& v : vars) g *= std::pow(alpha_of(v.slot->pairs()[v.pair], delta), std::abs(v.exponent));
      return g;
    };
    SplitSegment seg;
    seg.depth = pt->depth;
    seg.target = pt->value / r.ideal;
    seg.lower = signal(1.0);
    seg.upper = signal(0.0);
    std::size_t active = 0;
    for (const auto& v : vars) active += v.exponent != 0;
    seg.tuned_pairs = active;
    double delta = 0.5;
    if (active > 0) {
      if (seg.target < seg.lower || seg.target > seg.upper) {
        seg.violation = true;
        if (strict) {
          throw ModelViolation("Clifford signal " + std::to_string(seg.target) + " at depth " +
                               std::to_string(pt->depth) + " outside reachable interval [" +
                               std::to_string(seg.lower) + ", " + std::to_string(seg.upper) + "]");
        }
        delta = seg.target < seg.lower ? 1.0 : 0.0;
      } else {
        double lo = 0, hi = 1;
        while (hi - lo > tol) {
          const double mid = 0.5 * (lo + hi);
          (signal(mid) > seg.target ? lo : hi) = mid;
        }
        delta = 0.5 * (lo + hi);
      }
    }
    seg.delta = delta;
    for (const auto& v : vars) {
      FidelityPair& p = v.slot->pairs()[v.pair];
      if (v.exponent != 0) {
        const double a = alpha_of(p, delta);
        p.alpha = v.exponent > 0 ? a : 1.0 / a;
      }
      p.tuned = true;
    }
    report.segments.push_back(seg);
  }
  return report;
}

GeneratorFit fit_generators(const SparseBasis& basis, const std::vector<double>& pair, const std::vector<double>& alpha,
                            const BinaryMatrix& m, const BinaryMatrix& m_prime, Parity slot,
                            const std::vector<double>& split_weights) {
  const auto b = static_cast<Eigen::Index>(basis.size());
  if (!split_weights.empty() && static_cast<Eigen::Index>(split_weights.size()) != b) {
    throw SizeMismatch("split weight count differs from the basis size");
  }
  if (static_cast<Eigen::Index>(pair.size()) != b || static_cast<Eigen::Index>(alpha.size()) != b ||
      m.rows() != b || m.cols() != b || m_prime.rows() != b || m_prime.cols() != b) {
    throw SizeMismatch("generator fit inputs disagree with the basis size");
  }
  const Eigen::MatrixXd md = m.cast<double>(), mpd = m_prime.cast<double>();
  Eigen::MatrixXd a(2 * b, b);
  Eigen::VectorXd y(2 * b);
  const double r2 = std::sqrt(0.5);
  for (Eigen::Index i = 0; i < b; ++i) {
    if (!(pair[i] > 0)) throw InvalidArgument("pair fidelities must be positive");
    if (!(alpha[i] > 0)) throw InvalidArgument("split weights alpha must be positive");
    const double w = split_weights.empty() ? 1.0 : split_weights[i];
    const double yf = -0.5 * std::log(alpha[i] * pair[i]);
    const double yp = -0.5 * std::log(pair[i] / alpha[i]);
    a.row(i) = r2 * (md.row(i) + mpd.row(i));
    y(i) = r2 * (yf + yp);
    a.row(b + i) = w * r2 * (md.row(i) - mpd.row(i));
    y(b + i) = w * r2 * (yf - yp);
  }
  const NnlsResult r = nnls(a, y);
  GeneratorFit g;
  g.channel = PauliLindbladChannel::sparse(basis, std::vector<double>(r.x.data(), r.x.data() + b), slot);
  g.residual = r.residual;
  g.iterations = r.iterations;
  g.converged = r.converged;
  const Eigen::VectorXd s = (m.cast<double>() + m_prime.cast<double>()) * r.x;
  for (Eigen::Index i = 0; i < b; ++i) g.predicted_pair.push_back(std::exp(-s(i)));
  return g;
}

GeneratorFit fit_generators(const SlotFidelities& s, double untuned_weight) {
  const auto [m, mp] = build_anticommutation_matrices(s.basis(), s.layer());
  std::vector<double> w;
  for (bool t : s.basis_tuned()) w.push_back(t ? 1.0 : untuned_weight);
  return fit_generators(s.basis(), s.basis_pair(), s.basis_alpha(), m, mp, s.slot(), w);
}

std::vector<CliffordPoint> synth_clifford_signal(std::size_t n, std::size_t t_max, const NoiseModel& truth,
                                                 std::size_t shots, std::uint64_t seed) {
  const double q = std::numbers::pi / 4;
  std::vector<CliffordPoint> out;
  for (std::size_t t = 0; t <= t_max; ++t) {
    CliffordPoint pt;
    pt.depth = t;
    pt.circuit = build_brickwork({q, q, 0.0, n, t}, {.state_prep_layer = true});
    pt.observable = PauliString::single(n, t, PauliLetter::X);
    const double exact = pauli_propagation(pt.circuit, truth, pt.observable).value;
    if (shots == 0) {
      pt.value = exact;
    } else {
      std::mt19937_64 rng = seed_stream(seed, t);
      const auto [mean, err] = binomial_mean(exact, shots, rng);
      pt.value = mean;
      pt.stderr_ = err;
    }
    out.push_back(std::move(pt));
  }
  return out;
}

ValidationReport validate_model(const NoiseModel& model, const NoiseModel& reference, std::size_t n,
                                const std::vector<std::size_t>& depths) {
  ValidationReport rep;
  auto add = [&](const std::string& family, std::size_t depth, const BrickworkCircuit& c) {
    for (const auto& o : c.observables) {
      ValidationEntry e;
      e.circuit = family;
      e.depth = depth;
      e.observable = o.to_sparse_text();
      e.predicted = pauli_propagation(c, model, o).value;
      e.simulated = pauli_propagation(c, reference, o).value;
      e.relative_deviation = std::abs(e.simulated) > 1e-300 ? (e.predicted - e.simulated) / std::abs(e.simulated) : 0.0;
      double& mx = rep.max_deviation[family][depth];
      mx = std::max(mx, std::abs(e.relative_deviation));
      rep.entries.push_back(std::move(e));
    }
  };
  const double q = std::numbers::pi / 4;
  for (std::size_t d : depths) {
    add("repeated_even", d, build_repeated_layer_benchmark(Parity::even, d, n));
    add("repeated_odd", d, build_repeated_layer_benchmark(Parity::odd, d, n));
    add("mirror", d, build_mirror_circuit({q, q, 0.0, n, d}, d));
  }
  return rep;
}

LearningResult learn_noise_model(std::size_t n, const NoiseModel& truth, const LearningOptions& opts) {
  const SparseBasis basis(n);
  LearningResult res;
  SlotFidelities slots[2];
  for (Parity par : {Parity::even, Parity::odd}) {
    const Layer layer = clifford_layer(n, par);
    CycleBenchmarkOptions co = opts.cycle;
    co.seed = opts.cycle.seed * 2 + (par == Parity::odd ? 1 : 0);
    const auto fits = fit_pair_fidelities(synth_cycle_benchmark(layer, n, truth[par], co));
    res.fits.insert(res.fits.end(), fits.begin(), fits.end());
    slots[par == Parity::odd] = SlotFidelities(par, basis, CliffordLayer::from_gates(n, layer.gates), fits);
  }
  for (auto& s : slots) res.symmetric_fits.push_back(fit_generators(s));
  res.symmetric_model = {res.symmetric_fits[0].channel, res.symmetric_fits[1].channel};
  res.clifford = synth_clifford_signal(n, opts.clifford_t_max, truth, opts.clifford_shots, opts.cycle.seed + 7919);
  if (opts.finetune) {
    res.splits = finetune_splits(res.clifford, slots[0], slots[1], res.symmetric_model, false);
    for (auto& s : slots) res.generator_fits.push_back(fit_generators(s, opts.untuned_split_weight));
    res.model = {res.generator_fits[0].channel, res.generator_fits[1].channel};
  } else {
    res.generator_fits = res.symmetric_fits;
    res.model = res.symmetric_model;
  }
  return res;
}

nlohmann::json LearningResult::report() const {
  nlohmann::json j;
  j["pair_fidelities"] = nlohmann::json::array();
  for (const auto& f : fits) {
    j["pair_fidelities"].push_back({{"pauli", f.pauli.to_sparse_text()},
                                    {"slot", to_string(f.slot)},
                                    {"pair_fidelity", f.pair_fidelity},
                                    {"stderr", f.pair_fidelity_stderr},
                                    {"spam", f.spam},
                                    {"residual", f.residual},
                                    {"flagged", f.flagged}});
  }
  j["splits"] = nlohmann::json::array();
  for (const auto& s : splits.segments) {
    j["splits"].push_back({{"depth", s.depth},
                           {"delta", s.delta},
                           {"lower", s.lower},
                           {"upper", s.upper},
                           {"target", s.target},
                           {"tuned_pairs", s.tuned_pairs},
                           {"violation", s.violation}});
  }
  auto fits_json = [](const std::vector<GeneratorFit>& g) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& f : g) {
      a.push_back({{"slot", to_string(f.channel.slot())},
                   {"residual", f.residual},
                   {"iterations", f.iterations},
                   {"converged", f.converged},
                   {"total_rate", f.channel.total_rate()}});
    }
    return a;
  };
  j["generator_fits"] = fits_json(generator_fits);
  j["symmetric_fits"] = fits_json(symmetric_fits);
  j["clifford_signal"] = nlohmann::json::array();
  for (const auto& c : clifford) {
    j["clifford_signal"].push_back({{"depth", c.depth}, {"value", c.value}, {"stderr", c.stderr_}});
  }
  return j;
}

}  // namespace dutem

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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dutem/circuits.hpp"
#include "dutem/exact_sim.hpp"
#include "dutem/noise.hpp"
#include "dutem/nnls.hpp"
#include "dutem/pauli.hpp"
#include "json.hpp"

namespace dutem {

// Signal of one Pauli measured in a cycle benchmark, one entry per depth.
struct DecayData {
  PauliString pauli;
  Parity slot = Parity::even;
  std::vector<double> depths;
  std::vector<double> means;    // sign of the ideal value already removed
  std::vector<double> stderrs;  // empty or zero for exact data
};

struct DecayFit {
  PauliString pauli;
  Parity slot = Parity::even;
  std::vector<double> depths;
  std::vector<double> means;
  double pair_fidelity = 1;  // per layer
  double pair_fidelity_stderr = 0;
  double spam = 1;
  double residual = 0;        // max |model - data| over the points used
  std::vector<bool> dropped;  // points consistent with zero
  bool flagged = false;       // points dropped or the fidelity clamped to 1
};

// Log-linear least squares; weighted by the stated errors when present.
DecayFit fit_decay(const DecayData& data);
std::vector<DecayFit> fit_pair_fidelities(const std::vector<DecayData>& data);

// Product eigenstate settings whose Paulis jointly cover every weight-1 and
// nearest-neighbour weight-2 Pauli. Setting k uses letter (k0 + k1 q) mod 3 on
// qubit q, which gives all 9 letter pairs on every bond.
std::vector<std::vector<PauliLetter>> parallel_eigenstate_settings(std::size_t n);
// Index of the first setting in which p is diagonal, if any.
std::optional<std::size_t> covering_setting(const std::vector<std::vector<PauliLetter>>& settings, const PauliString& p);
bool covers_basis(const std::vector<std::vector<PauliLetter>>& settings, const SparseBasis& basis);

struct CycleBenchmarkOptions {
  std::vector<std::size_t> depths{0, 2, 6, 12, 20, 34};
  std::size_t settings = 64;  // twirl randomizations per point
  std::size_t shots = 32;     // shots per randomization
  double readout_error = 1.53e-2;
  std::uint64_t seed = 0;
  bool exact = false;  // skip shot noise
};

// Synthetic cycle-benchmark data for every basis Pauli of the layer's slot.
// Means come from exact Pauli propagation times the readout factor; shot noise
// is binomial over settings * shots outcomes.
std::vector<DecayData> synth_cycle_benchmark(const Layer& layer, std::size_t n, const PauliLindbladChannel& truth,
                                             const CycleBenchmarkOptions& opts);

// One conjugation pair {a, b = U a U^dag} of a Clifford layer. f_a = alpha * pair,
// f_b = pair / alpha.
struct FidelityPair {
  PauliString a;
  PauliString b;
  double pair = 1;
  double alpha = 1;
  bool tuned = false;
  double alpha_min() const { return pair; }
  double alpha_max() const { return 1.0 / pair; }
  bool self_conjugate() const { return same_up_to_phase(a, b); }
};

// Pair fidelities and splits of one noise slot.
class SlotFidelities {
 public:
  SlotFidelities() = default;
  SlotFidelities(Parity slot, const SparseBasis& basis, const CliffordLayer& layer, const std::vector<DecayFit>& fits);

  Parity slot() const { return slot_; }
  const SparseBasis& basis() const { return basis_; }
  const CliffordLayer& layer() const { return layer_; }
  std::vector<FidelityPair>& pairs() { return pairs_; }
  const std::vector<FidelityPair>& pairs() const { return pairs_; }
  // Pair index and whether p is the 'a' side.
  std::optional<std::pair<std::size_t, bool>> find(const PauliString& p) const;
  std::optional<double> fidelity(const PauliString& p) const;
  // Per basis entry: alpha_i with f_i = alpha_i * pair_i, and pair_i.
  std::vector<double> basis_alpha() const;
  std::vector<double> basis_pair() const;
  std::vector<bool> basis_tuned() const;
  void reset_splits();

 private:
  Parity slot_ = Parity::even;
  SparseBasis basis_{1};
  CliffordLayer layer_;
  std::vector<FidelityPair> pairs_;
  std::map<PauliString, std::size_t, PauliLess> index_;
};

// Clifford-point light-cone data point: measured signal and its error.
struct CliffordPoint {
  std::size_t depth = 0;
  double value = 0;
  double stderr_ = 0;
  BrickworkCircuit circuit;
  PauliString observable;
};

struct SplitSegment {
  std::size_t depth = 0;
  double delta = 0;
  double lower = 0;  // reachable signal interval
  double upper = 0;
  double target = 0;
  std::size_t tuned_pairs = 0;
  bool violation = false;  // target outside [lower, upper]; delta clamped
};

struct SplitReport {
  std::vector<SplitSegment> segments;
};

// Fixes the splits of the pairs entering each data point with a uniform delta,
// alpha(delta) = delta * alpha_min + (1 - delta) * alpha_max, solved by
// bisection. Fidelities outside the pairs come from `fallback`. A target
// outside the reachable interval throws ModelViolation when `strict`, else the
// segment is clamped and flagged.
SplitReport finetune_splits(const std::vector<CliffordPoint>& points, SlotFidelities& even, SlotFidelities& odd,
                            const NoiseModel& fallback, bool strict = true, double tol = 1e-12);

// Signal predicted from pair fidelities and splits along the propagation path.
double split_model_prediction(const BrickworkCircuit& c, const PauliString& o, const SlotFidelities& even,
                              const SlotFidelities& odd, const NoiseModel& fallback);

struct GeneratorFit {
  PauliLindbladChannel channel;
  double residual = 0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> predicted_pair;  // exp(-(M + M') lambda) per basis entry
};

// Non-negative fit of -1/2 log [f; f'] = [M; M'] lambda. The problem is solved
// in the rotated rows (M + M', M - M') / sqrt 2, which leaves the objective
// unchanged; split_weights (one per basis entry, default 1) scale the
// difference rows so that assumed splits can act as a soft prior.
GeneratorFit fit_generators(const SparseBasis& basis, const std::vector<double>& pair, const std::vector<double>& alpha,
                            const BinaryMatrix& m, const BinaryMatrix& m_prime, Parity slot,
                            const std::vector<double>& split_weights = {});
// Untuned pairs get `untuned_weight` on their difference rows.
GeneratorFit fit_generators(const SlotFidelities& s, double untuned_weight = 1.0);

// Light-cone Clifford circuits at depths 0..t_max with their exact noisy signal,
// optionally with binomial shot noise over `shots` outcomes.
std::vector<CliffordPoint> synth_clifford_signal(std::size_t n, std::size_t t_max, const NoiseModel& truth,
                                                 std::size_t shots, std::uint64_t seed);

struct ValidationEntry {
  std::string circuit;  // "repeated_even", "repeated_odd", "mirror"
  std::size_t depth = 0;
  std::string observable;
  double predicted = 0;
  double simulated = 0;
  double relative_deviation = 0;  // (predicted - simulated) / |simulated|
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  // Largest |relative_deviation| per circuit family and depth.
  std::map<std::string, std::map<std::size_t, double>> max_deviation;
};

// Compares model and reference predictions on repeated-layer and mirror
// benchmarks at the Clifford point.
ValidationReport validate_model(const NoiseModel& model, const NoiseModel& reference, std::size_t n,
                                const std::vector<std::size_t>& depths);

struct LearningOptions {
  CycleBenchmarkOptions cycle;
  std::size_t clifford_t_max = 3;
  std::size_t clifford_shots = 16384;
  bool finetune = true;
  // Weight of the difference rows of pairs not probed by Clifford data.
  double untuned_split_weight = 1e-3;
};

struct LearningResult {
  NoiseModel model;            // with Clifford splits
  NoiseModel symmetric_model;  // alpha = 1 everywhere
  std::vector<DecayFit> fits;
  std::vector<CliffordPoint> clifford;
  SplitReport splits;
  std::vector<GeneratorFit> generator_fits;  // even, odd
  std::vector<GeneratorFit> symmetric_fits;
  nlohmann::json report() const;
};

// Full synthetic learning loop against a known model.
LearningResult learn_noise_model(std::size_t n, const NoiseModel& truth, const LearningOptions& opts);

// The Clifford kicked-Ising layer of the given parity on n qubits.
Layer clifford_layer(std::size_t n, Parity parity);

}  // namespace dutem

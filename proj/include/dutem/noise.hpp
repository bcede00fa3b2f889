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
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dutem/circuits.hpp"
#include "dutem/pauli.hpp"
#include "json.hpp"

namespace dutem {

// Pauli-Lindblad channel exp(sum_j lambda_j (P_j . P_j - .)).
// Generators are normally drawn from a SparseBasis; arbitrary generators are
// accepted so out-of-model truths can be simulated.
class PauliLindbladChannel {
 public:
  PauliLindbladChannel() = default;
  PauliLindbladChannel(std::size_t n, std::vector<PauliString> generators, std::vector<double> rates, Parity slot);
  static PauliLindbladChannel sparse(const SparseBasis& basis, std::vector<double> rates, Parity slot);
  static PauliLindbladChannel zero(std::size_t n, Parity slot);

  std::size_t n_qubits() const { return n_; }
  Parity slot() const { return slot_; }
  std::size_t size() const { return generators_.size(); }
  const std::vector<PauliString>& generators() const { return generators_; }
  const std::vector<double>& rates() const { return rates_; }
  bool physical() const;  // all rates >= 0
  bool is_sparse() const;
  double total_rate() const;

  // exp(-2 * sum of rates of generators anticommuting with p).
  double fidelity(const PauliString& p) const;
  PauliLindbladChannel inverse() const;
  // Rates add; generators are merged.
  PauliLindbladChannel compose(const PauliLindbladChannel& other) const;
  double jump_probability(std::size_t j) const;
  // Draws one Pauli from the Kraus mixture; requires non-negative rates.
  PauliString sample_error(std::mt19937_64& rng) const;

 private:
  std::size_t n_ = 0;
  std::vector<PauliString> generators_;
  std::vector<double> rates_;
  Parity slot_ = Parity::even;
};

using SparsePauliLindblad = PauliLindbladChannel;

// One channel per noise slot.
struct NoiseModel {
  PauliLindbladChannel even;
  PauliLindbladChannel odd;

  static NoiseModel noiseless(std::size_t n);
  const PauliLindbladChannel& operator[](Parity p) const { return p == Parity::even ? even : odd; }
  PauliLindbladChannel& operator[](Parity p) { return p == Parity::even ? even : odd; }
  NoiseModel inverse() const { return {even.inverse(), odd.inverse()}; }
};

struct PauliFidelitySet {
  std::map<PauliString, double, PauliLess> values;
  std::map<PauliString, double, PauliLess> conjugate_values;
  double pair(const PauliString& p) const;
};
PauliFidelitySet fidelity_set(const PauliLindbladChannel& ch, const SparseBasis& basis, const CliffordLayer& layer);

// Diagonal PTM of a Pauli-Lindblad channel in factorized form: the entry for P
// is the product over generators of (commute ? 1 : exp(-2 lambda_j)).
struct PtmDiagonal {
  std::size_t n_qubits = 0;
  std::vector<PauliString> generators;
  std::vector<double> anticommute_values;

  double value(const PauliString& p) const;
  // All 4^n entries, index sum_q letter_q * 4^(n-1-q) (qubit 0 most significant).
  Eigen::VectorXd dense() const;
};
PtmDiagonal ptm_diagonal(const PauliLindbladChannel& ch);

// Pauli frame applied before a layer and the compensating operators after it.
struct TwirlDressing {
  PauliString before;
  // Per gate U P_loc U^dag, plus single-qubit Paulis on idle qubits.
  std::vector<Gate> after;
};
TwirlDressing twirl_layer(const Layer& layer, std::size_t n, std::mt19937_64& rng);
TwirlDressing identity_twirl(const Layer& layer, std::size_t n);

nlohmann::json channel_to_json(const PauliLindbladChannel& ch);
PauliLindbladChannel channel_from_json(const nlohmann::json& j, std::size_t n);
nlohmann::json noise_model_to_json(const NoiseModel& m);
NoiseModel noise_model_from_json(const nlohmann::json& j, std::size_t n);

}  // namespace dutem

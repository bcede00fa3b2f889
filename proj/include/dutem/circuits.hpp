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
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "dutem/gate.hpp"
#include "dutem/pauli.hpp"

namespace dutem {

enum class Parity { even, odd };
std::string to_string(Parity p);
Parity parity_from_string(const std::string& s);

struct KickedIsingParams {
  double J = 0;
  double b = 0;
  double h = 0;
  std::size_t n_qubits = 0;
  std::size_t t_steps = 0;

  bool is_dual_unitary(double tol = 1e-12) const;
  bool is_clifford(double tol = 1e-12) const;
  // Throws InvalidArgument for even n_qubits.
  void validate() const;
};

struct InitialState {
  enum class Kind { plus_bell, zeros, pauli_eigenstate };
  Kind kind = Kind::zeros;
  // For pauli_eigenstate: the state is the +1 eigenstate of this (signed,
  // Hermitian) string. Sites outside its support are |0>.
  PauliString pauli;

  static InitialState plus_bell() { return {Kind::plus_bell, {}}; }
  static InitialState zeros() { return {Kind::zeros, {}}; }
  static InitialState eigenstate(const PauliString& p);

  void validate(std::size_t n) const;
  // Exact <psi|P|psi> (sign of P included).
  double pauli_expectation(const PauliString& p) const;
};

struct Layer {
  Parity parity = Parity::even;
  Parity noise_slot = Parity::even;
  std::vector<Gate> gates;
  bool clifford = false;
  std::string label;
};

struct BrickworkCircuit {
  std::size_t n_qubits = 0;
  InitialState initial;
  std::vector<Layer> layers;
  std::vector<PauliString> observables;
  std::optional<KickedIsingParams> params;

  std::size_t depth() const { return layers.size(); }
  bool all_clifford() const;
};

Eigen::Matrix4cd two_qubit_block(const KickedIsingParams& p);
// Realignment U_{(a b),(c d)} -> U_{(a c),(b d)}; a dual-unitary gate stays unitary.
Eigen::Matrix4cd reshuffle(const Eigen::Matrix4cd& u);
bool is_dual_unitary_gate(const Eigen::Matrix4cd& u, double tol = 1e-12);
bool is_clifford_gate(const Gate& g);

// Disjoint copies of `block` on (0,1),(2,3),... for even parity and (1,2),(3,4),...
// for odd parity.
Layer make_layer(std::size_t n, Parity parity, const Eigen::Matrix4cd& block, Parity slot);

struct BrickworkOptions {
  // Start from |0...0> and include the |+> / Bell preparation as a layer in the
  // odd noise slot, instead of starting directly from the plus_bell state.
  bool state_prep_layer = false;
};

BrickworkCircuit build_brickwork(const KickedIsingParams& p, const BrickworkOptions& opts = {});
// H on qubit 0 and a Bell preparation (H then CNOT) on (1,2),(3,4),...
Layer state_prep_layer(std::size_t n);

// Prepare the +1 eigenstate of `prepared`, apply `layer` depth times, measure `prepared`.
BrickworkCircuit build_cycle_benchmark(const Layer& layer, std::size_t n, const PauliString& prepared,
                                       std::size_t depth);
BrickworkCircuit build_repeated_layer_benchmark(Parity parity, std::size_t cycles, std::size_t n);
// Prep, T forward steps, their inverse in reverse order, unprep; observe Z on every qubit.
BrickworkCircuit build_mirror_circuit(const KickedIsingParams& p, std::size_t T);

// Keeps only gates inside the backward light cone of `site` at the final layer.
BrickworkCircuit light_cone_restrict(const BrickworkCircuit& c, std::size_t site);

nlohmann::json circuit_to_json(const BrickworkCircuit& c);
BrickworkCircuit circuit_from_json(const nlohmann::json& j);

}  // namespace dutem

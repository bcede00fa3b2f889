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
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dutem/circuits.hpp"
#include "dutem/noise.hpp"

namespace dutem {

inline constexpr std::size_t kStatevectorCap = 14;
inline constexpr std::size_t kDensityMatrixCap = 8;

double analytic_correlator(double h, std::size_t n, std::size_t t);
Eigen::Matrix4d transfer_map_mu(const KickedIsingParams& p);
// Tr(|+><+| M^n [X])
double transfer_map_correlator(const KickedIsingParams& p, std::size_t n);

class Statevector {
 public:
  explicit Statevector(std::size_t n);  // |0...0>
  static Statevector prepare(const InitialState& s, std::size_t n);

  std::size_t n_qubits() const { return n_; }
  Eigen::VectorXcd& amplitudes() { return amps_; }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }

  void apply(const Gate& g);
  void apply(const Layer& l);
  void apply_pauli(const PauliString& p);
  double expectation(const PauliString& p) const;

 private:
  std::size_t n_;
  Eigen::VectorXcd amps_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(const Statevector& psi);
  std::size_t n_qubits() const { return n_; }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  Eigen::MatrixXcd& matrix() { return rho_; }

  void apply(const Gate& g);
  void apply(const Layer& l);
  void apply(const PauliLindbladChannel& ch);
  double expectation(const PauliString& p) const;
  double trace() const { return rho_.trace().real(); }

 private:
  std::size_t n_;
  Eigen::MatrixXcd rho_;
};

double statevector_expectation(const BrickworkCircuit& c, const PauliString& observable);
Statevector final_statevector(const BrickworkCircuit& c);
// Channels act before their layer.
DensityMatrix final_density_matrix(const BrickworkCircuit& c, const NoiseModel& noise);
double noisy_expectation_dm(const BrickworkCircuit& c, const NoiseModel& noise, const PauliString& observable);

struct MonteCarloEstimate {
  double mean = 0;
  double stderr_ = 0;
};
// Stochastic unraveling: sampled Pauli errors before each layer.
MonteCarloEstimate trajectory_expectation(const BrickworkCircuit& c, const NoiseModel& noise, const PauliString& observable,
                                          std::size_t trajectories, std::mt19937_64& rng);

struct ContributingFidelity {
  std::size_t layer = 0;
  Parity slot = Parity::even;
  PauliString pauli;  // unsigned operator the channel acts on
};

struct PropagationResult {
  double value = 0;  // product of fidelities times ideal value
  double ideal = 0;
  std::vector<ContributingFidelity> path;  // ordered from the first layer to the last
};
// Heisenberg propagation of a Pauli through a Clifford circuit.
PropagationResult pauli_propagation(const BrickworkCircuit& c, const NoiseModel& noise, const PauliString& observable);

// Tr[rho_inf X_0(0) O(t)] with rho_inf = I/2^N, by summing over computational
// basis states (the |+> site is handled by inserting X_0).
double infinite_temperature_correlator(const BrickworkCircuit& c, const PauliString& observable);

}  // namespace dutem

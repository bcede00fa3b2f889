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
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dutem/circuits.hpp"
#include "dutem/noise.hpp"

namespace dutem {

namespace tn {
template <class T>
class Mps;
}

enum class Basis : std::uint8_t { X = 1, Y = 2, Z = 3 };

struct BasisDistribution {
  double px = 1.0 / 3, py = 1.0 / 3, pz = 1.0 / 3;

  static BasisDistribution uniform() { return {}; }
  static BasisDistribution signal_biased() { return {0.8, 0.1, 0.1}; }
  double p(Basis b) const { return b == Basis::X ? px : b == Basis::Y ? py : pz; }
  // Throws InvalidArgument unless all entries are positive and sum to 1.
  void validate() const;
};

// Signal qubit gets (0.8, 0.1, 0.1); every other qubit is uniform.
std::vector<BasisDistribution> signal_biased_distributions(std::size_t n, std::size_t signal_qubit);

struct MeasurementSetting {
  std::vector<Basis> bases;
  std::uint64_t twirl_seed = 0;
};

std::vector<MeasurementSetting> sample_settings(const std::vector<BasisDistribution>& dists, std::size_t count,
                                                std::mt19937_64& rng);

struct ShotRecord {
  std::uint32_t setting_id = 0;
  std::vector<Basis> bases;
  std::uint64_t twirl_seed = 0;
  std::vector<std::uint8_t> flip_mask;  // TREX X flips applied before readout
  std::vector<std::uint8_t> outcome;    // raw measured bits
  // Bit after undoing the TREX flip; 0 means the +1 eigenvalue.
  std::uint8_t corrected(std::size_t q) const { return outcome[q] ^ flip_mask[q]; }
};

struct ReadoutNoise {
  std::vector<double> p01;  // P(read 1 | 0)
  std::vector<double> p10;  // P(read 0 | 1)

  static ReadoutNoise none(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)}; }
  static ReadoutNoise uniform(std::size_t n, double p) { return {std::vector<double>(n, p), std::vector<double>(n, p)}; }
  std::size_t n_qubits() const { return p01.size(); }
  // <Z> of |0> after TREX symmetrization.
  double calibration(std::size_t q) const { return 1.0 - p01[q] - p10[q]; }
};

enum class ShotBackend { density, trajectory };

struct ShotOptions {
  std::size_t shots_per_setting = 1;
  ShotBackend backend = ShotBackend::density;
  bool trex = true;
  std::uint64_t seed = 0;
};

// Deterministic per-setting streams: setting c uses seed_stream(seed, c).
std::mt19937_64 seed_stream(std::uint64_t seed, std::uint64_t stream);

std::vector<ShotRecord> generate_shots(const BrickworkCircuit& c, const NoiseModel& noise, const ReadoutNoise& readout,
                                       const std::vector<MeasurementSetting>& settings, const ShotOptions& opts);

struct Estimate {
  double value = 0;
  double stderr_ = 0;
};

// Per-qubit dual components in the expectation convention: row m = 2*(basis-1)+bit,
// columns I,X,Y,Z; entries 1 for I and +-1/p for the measured basis.
Eigen::Matrix<double, 6, 4> dual_table(const BasisDistribution& d, double calibration = 1.0);
// D = (I +- P/p)/2 and Pi = p |+-><+-|
Eigen::Matrix2cd dual_operator(const BasisDistribution& d, Basis b, int bit);
Eigen::Matrix2cd povm_effect(const BasisDistribution& d, Basis b, int bit);

// Observable as an MPS over Pauli coefficients (phys dim 4, order I,X,Y,Z).
Estimate estimate(const std::vector<ShotRecord>& records, const tn::Mps<double>& observable,
                  const std::vector<BasisDistribution>& dists, const std::vector<double>& calibration = {});
Estimate estimate_pauli(const std::vector<ShotRecord>& records, const PauliString& observable,
                        const std::vector<BasisDistribution>& dists, const std::vector<double>& calibration = {});
// Per-shot estimator values xi(c, s) grouped by setting, then the grouped
// standard error; groups of size one reduce to the plain standard error.
Estimate grouped_estimate(const std::vector<std::uint32_t>& setting_ids, const std::vector<double>& xi);

struct TrexCalibration {
  std::vector<double> value;
  std::vector<double> stderr_;
};
TrexCalibration calibrate_trex(const ReadoutNoise& readout, std::size_t shots, std::mt19937_64& rng);
std::vector<Estimate> trex_mitigate(const std::vector<Estimate>& raw, const std::vector<Estimate>& calibration);

void write_shots(std::ostream& os, std::size_t n, const std::vector<ShotRecord>& records);
std::vector<ShotRecord> read_shots(std::istream& is, std::size_t* n_out = nullptr);

}  // namespace dutem

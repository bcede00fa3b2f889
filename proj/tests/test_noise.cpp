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

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "dense_oracle.hpp"
#include "doctest.h"
#include "dutem/error.hpp"
#include "dutem/exact_sim.hpp"
#include "dutem/learning.hpp"
#include "dutem/noise.hpp"

using namespace dutem;

namespace {

std::string letters_of(const PauliString& p) {
  std::string s;
  for (std::size_t q = 0; q < p.n_qubits(); ++q) s += letter_char(p.letter(q));
  return s;
}

PauliLindbladChannel random_channel(std::size_t n, std::uint64_t seed, Parity slot = Parity::even) {
  const SparseBasis b(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 0.05);
  std::vector<double> r;
  for (std::size_t i = 0; i < b.size(); ++i) r.push_back(u(rng));
  return PauliLindbladChannel::sparse(b, r, slot);
}

oracle::Mat channel_superop(const PauliLindbladChannel& ch) {
  std::vector<std::string> g;
  for (const auto& p : ch.generators()) g.push_back(letters_of(p));
  return oracle::lindblad_superop(g, ch.rates());
}

}  // namespace

TEST_SUITE("noise") {
  TEST_CASE("PTM of the Lindblad exponential is the fidelity diagonal") {
    for (std::size_t n : {1u, 2u, 3u}) {
      const auto ch = random_channel(n, 7 + n);
      const Eigen::MatrixXd r = oracle::ptm(channel_superop(ch), n);
      const Eigen::VectorXd d = ptm_diagonal(ch).dense();
      CHECK((r - Eigen::MatrixXd(d.asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
      for (Eigen::Index a = 0; a < d.size(); ++a) {
        const auto p = PauliString::from_text(oracle::ptm_letters(a, n));
        CHECK(std::abs(ch.fidelity(p) - r(a, a)) < 1e-12);
        CHECK(ch.fidelity(p) <= 1.0);
      }
    }
  }

  TEST_CASE("known single-qubit values") {
    const SparseBasis b(1);
    const auto ch = PauliLindbladChannel::sparse(b, {0.1, 0.0, 0.0}, Parity::even);  // X only
    CHECK(ch.fidelity(PauliString::from_text("X")) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(ch.fidelity(PauliString::from_text("Z")) - std::exp(-0.2)) < 1e-15);
    CHECK(std::abs(ch.jump_probability(0) - (1 - std::exp(-0.2)) / 2) < 1e-15);
    CHECK(std::abs(ch.total_rate() - 0.1) < 1e-15);
  }

  TEST_CASE("density-matrix channel application matches the oracle") {
    const std::size_t n = 3;
    const auto ch = random_channel(n, 99);
    Statevector psi(n);
    psi.apply(gates::single(0, gates::hadamard()));
    psi.apply(gates::pair(0, 2, gates::cnot()));
    psi.apply(gates::single(1, gates::hadamard()));
    psi.apply(gates::single(1, gates::phase_s()));
    DensityMatrix rho(psi);
    const oracle::Mat r0 = rho.matrix();
    rho.apply(ch);
    const oracle::Mat expect = oracle::unvec(channel_superop(ch) * oracle::vec(r0), 8);
    CHECK((rho.matrix() - expect).norm() < 1e-12);
    CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
  }

  TEST_CASE("inverse and composition") {
    const auto ch = random_channel(3, 5);
    const auto inv = ch.inverse();
    CHECK(!inv.physical());
    CHECK(ch.physical());
    const auto id = ch.compose(inv);
    const SparseBasis basis(3);
    for (const auto& p : basis.entries()) {
      CHECK(std::abs(id.fidelity(p) - 1.0) < 1e-14);
      CHECK(std::abs(ch.fidelity(p) * inv.fidelity(p) - 1.0) < 1e-14);
    }
    const auto twice = ch.compose(ch);
    const auto p = PauliString::from_text("XYZ");
    CHECK(std::abs(twice.fidelity(p) - ch.fidelity(p) * ch.fidelity(p)) < 1e-14);
    CHECK(ch.is_sparse());
    CHECK(!PauliLindbladChannel(3, {PauliString::from_text("XYZ")}, {0.1}, Parity::odd).is_sparse());
    CHECK_THROWS(PauliLindbladChannel(3, {PauliString(3)}, {0.1}, Parity::odd));
    std::mt19937_64 rng(1);
    CHECK_THROWS(inv.sample_error(rng));
  }

  TEST_CASE("sampled errors follow the jump probabilities") {
    const SparseBasis b(1);
    const auto ch = PauliLindbladChannel::sparse(b, {0.05, 0.1, 0.2}, Parity::even);
    std::mt19937_64 rng(17);
    std::map<std::string, int> counts;
    const int trials = 200000;
    for (int k = 0; k < trials; ++k) counts[letters_of(ch.sample_error(rng))]++;
    // Exact Pauli-channel probabilities from the fidelities.
    const double fx = ch.fidelity(PauliString::from_text("X"));
    const double fy = ch.fidelity(PauliString::from_text("Y"));
    const double fz = ch.fidelity(PauliString::from_text("Z"));
    const std::map<std::string, double> prob{{"I", (1 + fx + fy + fz) / 4},
                                             {"X", (1 + fx - fy - fz) / 4},
                                             {"Y", (1 - fx + fy - fz) / 4},
                                             {"Z", (1 - fx - fy + fz) / 4}};
    for (const auto& [k, p] : prob) {
      const double sigma = std::sqrt(p * (1 - p) / trials);
      CHECK(std::abs(counts[k] / double(trials) - p) < 5 * sigma);
    }
  }

  TEST_CASE("pair fidelities are the geometric mean over the conjugation pair") {
    const std::size_t n = 5;
    const auto ch = random_channel(n, 3);
    const SparseBasis b(n);
    const Layer l = clifford_layer(n, Parity::even);
    const CliffordLayer cl = CliffordLayer::from_gates(n, l.gates);
    const PauliFidelitySet fs = fidelity_set(ch, b, cl);
    for (const auto& p : b.entries()) {
      const double f = ch.fidelity(p), fp = ch.fidelity(cl.conjugate(p));
      CHECK(std::abs(fs.values.at(p) - f) < 1e-15);
      CHECK(std::abs(fs.pair(p) - std::sqrt(f * fp)) < 1e-15);
    }
  }

  TEST_CASE("twirled layers implement the same unitary") {
    const std::size_t n = 4;
    const Layer l = make_layer(n, Parity::odd, two_qubit_block({0.7, 0.3, 0.2, n, 0}), Parity::odd);
    std::mt19937_64 rng(4);
    Statevector ref(n);
    ref.apply(gates::single(0, gates::hadamard()));
    ref.apply(gates::single(2, gates::hadamard()));
    for (int k = 0; k < 20; ++k) {
      const TwirlDressing tw = twirl_layer(l, n, rng);
      Statevector a = ref, b = ref;
      a.apply(l);
      b.apply_pauli(tw.before);
      b.apply(l);
      for (const auto& g : tw.after) b.apply(g);
      CHECK(std::abs(std::abs(a.amplitudes().dot(b.amplitudes())) - 1.0) < 1e-12);
    }
  }

  TEST_CASE("noise-model JSON round trip") {
    NoiseModel m{random_channel(5, 1, Parity::even), random_channel(5, 2, Parity::odd)};
    const auto j = noise_model_to_json(m);
    const NoiseModel r = noise_model_from_json(j, 5);
    CHECK(noise_model_to_json(r) == j);
    REQUIRE(r.even.size() == m.even.size());
    for (std::size_t k = 0; k < m.even.size(); ++k) {
      CHECK(r.even.rates()[k] == m.even.rates()[k]);
      CHECK(r.even.generators()[k] == m.even.generators()[k]);
    }
    CHECK(j["channels"][0]["entries"][15]["pauli"] == "+XX@(0,1)");
    CHECK_THROWS(channel_from_json(nlohmann::json::parse(R"j({"layer_id":"even","n_qubits":5,"entries":[{"pauli":"+XQ@(0,1)","rate":0.1}]})j"), 5));
  }
}

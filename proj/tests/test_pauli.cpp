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

#include <random>

#include "dense_oracle.hpp"
#include "doctest.h"
#include "dutem/error.hpp"
#include "dutem/learning.hpp"
#include "dutem/pauli.hpp"

using namespace dutem;

namespace {

std::string letters_of(const PauliString& p) {
  std::string s;
  for (std::size_t q = 0; q < p.n_qubits(); ++q) s += letter_char(p.letter(q));
  return s;
}

oracle::Mat dense_of(const PauliString& p) {
  const oracle::cd ph[4] = {1.0, oracle::cd(0, 1), -1.0, oracle::cd(0, -1)};
  return ph[p.phase()] * oracle::pauli(letters_of(p));
}

std::vector<PauliString> all_paulis(std::size_t n) {
  std::vector<PauliString> out;
  for (std::size_t k = 0; k < (std::size_t{1} << (2 * n)); ++k) {
    PauliString p(n);
    for (std::size_t q = 0; q < n; ++q) p.set(q, static_cast<PauliLetter>((k >> (2 * q)) & 3u));
    out.push_back(p);
  }
  return out;
}

}  // namespace

TEST_SUITE("pauli") {
  TEST_CASE("products and commutation agree with dense matrices for n <= 3") {
    for (std::size_t n = 1; n <= 3; ++n) {
      const auto ps = all_paulis(n);
      for (const auto& a0 : ps) {
        for (const auto& b0 : ps) {
          PauliString a = a0, b = b0;
          a.set_phase(static_cast<int>((a0.x_words()[0] + 3 * b0.z_words()[0]) % 4));
          const PauliString c = a * b;
          CHECK((dense_of(c) - dense_of(a) * dense_of(b)).norm() < 1e-12);
          const oracle::Mat comm = dense_of(a) * dense_of(b) - dense_of(b) * dense_of(a);
          CHECK(anticommutes(a, b) == (comm.norm() > 1e-9));
        }
      }
    }
  }

  TEST_CASE("dense() matches the oracle including phase") {
    const auto p = PauliString::from_text("-iXYZ");
    CHECK((p.dense() - dense_of(p)).norm() < 1e-12);
    CHECK(p.phase() == 3);
  }

  TEST_CASE("text round trips") {
    for (const char* t : {"+XIZZ", "-Y", "+iXX", "-iZ", "+IIII"}) {
      CHECK(PauliString::from_text(t).to_text() == std::string(t));
    }
    const auto p = PauliString::from_sparse_text(7, "+XZ@(3,4)");
    CHECK(p.letter(3) == PauliLetter::X);
    CHECK(p.letter(4) == PauliLetter::Z);
    CHECK(p.weight() == 2);
    CHECK(p.to_sparse_text() == "+XZ@(3,4)");
    CHECK(PauliString::from_sparse_text(7, p.to_sparse_text()) == p);
    CHECK(PauliString(5).to_sparse_text() == "+@()");
    CHECK(PauliString::from_text("XIZ").sign() == 1);
    CHECK_THROWS_AS(PauliString::from_text("+iX").sign(), Error);
    CHECK_THROWS(PauliString::from_text("+XQ"));
  }

  TEST_CASE("wide strings span several words") {
    const std::size_t n = 130;
    const auto a = PauliString::single(n, 129, PauliLetter::X);
    const auto b = PauliString::single(n, 129, PauliLetter::Z);
    CHECK(anticommutes(a, b));
    CHECK((a * b).letter(129) == PauliLetter::Y);
    CHECK((a * b).phase() == 3);  // XZ = -iY
    CHECK(!anticommutes(a, PauliString::single(n, 64, PauliLetter::Z)));
  }

  TEST_CASE("sparse basis size and ordering") {
    for (std::size_t n : {2u, 3u, 7u, 11u}) {
      const SparseBasis b(n);
      CHECK(b.size() == SparseBasis::expected_size(n));
      CHECK(b.size() == 3 * n + 9 * (n - 1));
    }
    const SparseBasis b(3);
    CHECK(b[0].to_text() == "+XII");
    CHECK(b[1].to_text() == "+YII");
    CHECK(b[2].to_text() == "+ZII");
    CHECK(b[9].to_text() == "+XXI");
    CHECK(b[10].to_text() == "+XYI");
    CHECK(b[18].to_text() == "+IXX");
    CHECK(b.index_of(PauliString::from_text("-IZY")).value() == 18 + 7);
    CHECK(!b.index_of(PauliString::from_text("XIX")));
  }

  TEST_CASE("Clifford conjugation matches dense U P U^dag") {
    const std::size_t n = 3;
    std::vector<std::pair<std::string, CliffordLayer>> layers{
        {"H", CliffordLayer::hadamard(n, 1)},
        {"S", CliffordLayer::phase(n, 2)},
        {"CZ", CliffordLayer::cz(n, 0, 2)},
        {"CNOT", CliffordLayer::cnot(n, 2, 0)},
    };
    std::vector<oracle::Mat> us{oracle::embed(n, {1}, gates::hadamard()), oracle::embed(n, {2}, gates::phase_s()),
                                oracle::embed(n, {0, 2}, gates::cz()), oracle::embed(n, {2, 0}, gates::cnot())};
    const Layer ki = clifford_layer(n, Parity::even);
    layers.push_back({"KI", CliffordLayer::from_gates(n, ki.gates)});
    us.push_back(oracle::embed(n, ki.gates[0].qubits, ki.gates[0].matrix));
    layers.push_back({"H then KI", layers[0].second.then(layers[4].second)});
    us.push_back(us[4] * us[0]);
    for (std::size_t k = 0; k < layers.size(); ++k) {
      CAPTURE(layers[k].first);
      CHECK(layers[k].second.is_symplectic());
      for (const auto& p : all_paulis(n)) {
        const oracle::Mat expect = us[k] * dense_of(p) * us[k].adjoint();
        CHECK((dense_of(layers[k].second.conjugate(p)) - expect).norm() < 1e-10);
      }
    }
  }

  TEST_CASE("non-Clifford and overlapping gates are rejected") {
    Eigen::Matrix2cd t = Eigen::Matrix2cd::Identity();
    t(1, 1) = std::polar(1.0, 0.25 * 3.14159265358979);
    CHECK_THROWS_AS(CliffordLayer::from_gates(2, {gates::single(0, t)}), NotClifford);
    CHECK_THROWS(CliffordLayer::from_gates(3, {gates::pair(0, 1, gates::cz()), gates::pair(1, 2, gates::cz())}));
  }

  TEST_CASE("anticommutation matrices match dense checks") {
    const std::size_t n = 3;
    const SparseBasis b(n);
    const Layer ki = clifford_layer(n, Parity::odd);
    const CliffordLayer cl = CliffordLayer::from_gates(n, ki.gates);
    const auto [m, mp] = build_anticommutation_matrices(b, cl);
    const oracle::Mat u = oracle::embed(n, ki.gates[0].qubits, ki.gates[0].matrix);
    for (std::size_t i = 0; i < b.size(); ++i) {
      CHECK(m(i, i) == 0);
      const oracle::Mat pi = dense_of(b[i]);
      const oracle::Mat ci = u * pi * u.adjoint();
      for (std::size_t j = 0; j < b.size(); ++j) {
        const oracle::Mat pj = dense_of(b[j]);
        CHECK(m(i, j) == ((pi * pj + pj * pi).norm() < 1e-9 ? 1 : 0));
        CHECK(mp(i, j) == ((ci * pj + pj * ci).norm() < 1e-9 ? 1 : 0));
      }
    }
    for (const auto& g : b.entries()) CHECK(!anticommutes(PauliString(n), g));
  }
}

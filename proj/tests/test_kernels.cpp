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

#include "doctest.h"
#include "dutem/kernels.hpp"

using namespace dutem;
using kernels::cd;

namespace {

Eigen::VectorXcd random_vector(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(dim);
  for (auto& x : v) x = cd(g(rng), g(rng));
  return v;
}

template <int N>
Eigen::Matrix<cd, N, N> random_matrix(std::uint64_t seed) {
  const Eigen::VectorXcd v = random_vector(N * N, seed);
  return Eigen::Map<const Eigen::Matrix<cd, N, N>>(v.data());
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("serial and parallel single-qubit kernels agree") {
    const std::size_t n = 12;
    for (std::size_t q : {0u, 5u, 11u}) {
      Eigen::VectorXcd a = random_vector(std::size_t{1} << n, q), b = a;
      const auto m = random_matrix<2>(100 + q);
      kernels::serial::apply_1q(a.data(), n, q, m);
      kernels::parallel::apply_1q(b.data(), n, q, m);
      CHECK((a - b).norm() == 0.0);
    }
  }

  TEST_CASE("serial and parallel two-qubit kernels agree") {
    const std::size_t n = 12;
    for (auto [q0, q1] : {std::pair{0u, 1u}, {7u, 2u}, {11u, 10u}, {3u, 9u}}) {
      Eigen::VectorXcd a = random_vector(std::size_t{1} << n, q0), b = a;
      const auto m = random_matrix<4>(200 + q1);
      kernels::serial::apply_2q(a.data(), n, q0, q1, m);
      kernels::parallel::apply_2q(b.data(), n, q0, q1, m);
      CHECK((a - b).norm() == 0.0);
    }
  }

  TEST_CASE("two-qubit kernel follows the local index convention") {
    // CNOT with control on the first listed qubit, here qubit 2.
    Eigen::Matrix4cd cnot;
    cnot << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(8);
    v(4) = 1;  // qubit 2 set
    kernels::serial::apply_2q(v.data(), 3, 2, 0, cnot);
    CHECK(std::abs(v(5) - cd(1)) < 1e-15);
  }

  TEST_CASE("serial and parallel Pauli mixing agree") {
    const std::size_t n = 5;
    const std::size_t d = std::size_t{1} << n;
    Eigen::MatrixXcd a(d, d);
    Eigen::Map<Eigen::VectorXcd>(a.data(), a.size()) = random_vector(d * d, 9);
    Eigen::MatrixXcd b = a;
    kernels::serial::pauli_mix_dm(a.data(), n, 0b10110, 0b00111, 0.13);
    kernels::parallel::pauli_mix_dm(b.data(), n, 0b10110, 0b00111, 0.13);
    CHECK((a - b).norm() == 0.0);
  }

  TEST_CASE("serial and parallel selector contraction agree") {
    const std::size_t n = 6, shots = 5000, chi = 3;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    kernels::SelectorTensors t;
    for (std::size_t q = 0; q < n; ++q) {
      const Eigen::Index rows = q == 0 ? 1 : chi, cols = q + 1 == n ? 1 : chi;
      std::vector<Eigen::MatrixXd> site;
      for (int m = 0; m < 6; ++m) site.push_back(Eigen::MatrixXd::NullaryExpr(rows, cols, [&] { return g(rng); }));
      t.mats.push_back(site);
    }
    std::vector<std::uint8_t> outcomes(shots * n);
    std::uniform_int_distribution<int> u(0, 5);
    for (auto& o : outcomes) o = static_cast<std::uint8_t>(u(rng));
    std::vector<double> xs(shots), xp(shots);
    kernels::serial::contract_selectors(t, outcomes.data(), shots, xs.data());
    kernels::parallel::contract_selectors(t, outcomes.data(), shots, xp.data());
    CHECK(xs == xp);
    // First shot by hand.
    Eigen::MatrixXd acc = t.mats[0][outcomes[0]];
    for (std::size_t q = 1; q < n; ++q) acc = acc * t.mats[q][outcomes[q]];
    CHECK(std::abs(acc(0, 0) - xs[0]) < 1e-12);
  }
}

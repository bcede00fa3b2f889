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

// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <random>

#include "dutem/kernels.hpp"

using namespace dutem;
using kernels::cd;

namespace {

Eigen::VectorXcd random_state(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(std::size_t{1} << n);
  for (auto& x : v) x = cd(g(rng), g(rng));
  return v.normalized();
}

template <bool Parallel>
void bm_apply_2q(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  Eigen::VectorXcd psi = random_state(n);
  const Eigen::Matrix4cd m = Eigen::Matrix4cd::Random();
  for (auto _ : st) {
    for (std::size_t q = 0; q + 1 < n; q += 2) {
      if constexpr (Parallel) kernels::parallel::apply_2q(psi.data(), n, q, q + 1, m);
      else kernels::serial::apply_2q(psi.data(), n, q, q + 1, m);
    }
    benchmark::DoNotOptimize(psi.data());
  }
}

template <bool Parallel>
void bm_pauli_mix(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const std::size_t d = std::size_t{1} << n;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(d, d) / double(d);
  for (auto _ : st) {
    if constexpr (Parallel) kernels::parallel::pauli_mix_dm(rho.data(), n, 0b101, 0b011, 0.01);
    else kernels::serial::pauli_mix_dm(rho.data(), n, 0b101, 0b011, 0.01);
    benchmark::DoNotOptimize(rho.data());
  }
}

template <bool Parallel>
void bm_contract(benchmark::State& st) {
  const std::size_t n = 9, shots = static_cast<std::size_t>(st.range(0));
  kernels::SelectorTensors t;
  for (std::size_t q = 0; q < n; ++q) {
    const Eigen::Index l = q == 0 ? 1 : 4, r = q + 1 == n ? 1 : 4;
    t.mats.emplace_back(6, Eigen::MatrixXd::Random(l, r));
  }
  std::mt19937_64 rng(2);
  std::vector<std::uint8_t> out(shots * n);
  for (auto& o : out) o = static_cast<std::uint8_t>(rng() % 6);
  std::vector<double> xi(shots);
  for (auto _ : st) {
    if constexpr (Parallel) kernels::parallel::contract_selectors(t, out.data(), shots, xi.data());
    else kernels::serial::contract_selectors(t, out.data(), shots, xi.data());
    benchmark::DoNotOptimize(xi.data());
  }
}

}  // namespace

BENCHMARK(bm_apply_2q<false>)->Arg(16)->Arg(20);
BENCHMARK(bm_apply_2q<true>)->Arg(16)->Arg(20);
BENCHMARK(bm_pauli_mix<false>)->Arg(8)->Arg(10);
BENCHMARK(bm_pauli_mix<true>)->Arg(8)->Arg(10);
BENCHMARK(bm_contract<false>)->Arg(1 << 16);
BENCHMARK(bm_contract<true>)->Arg(1 << 16);

BENCHMARK_MAIN();

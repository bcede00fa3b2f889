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

// Data-parallel inner loops. Each kernel has a serial reference version and an
// OpenMP version with identical results; tests compare the two and the
// bench_kernels target times them.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace dutem::kernels {

using cd = std::complex<double>;

// Per-site selector matrices for the shot estimator: mats[q][m] is the bond
// matrix chosen by outcome m (0..5) on site q.
struct SelectorTensors {
  std::vector<std::vector<Eigen::MatrixXd>> mats;
};

#define DUTEM_KERNEL_DECLS                                                                                   \
  void apply_1q(cd* psi, std::size_t n, std::size_t q, const Eigen::Matrix2cd& m);                          \
  /* Local index 2*bit(q0)+bit(q1). */                                                                       \
  void apply_2q(cd* psi, std::size_t n, std::size_t q0, std::size_t q1, const Eigen::Matrix4cd& m);         \
  /* rho <- (1-p) rho + p P rho P for P with masks (x, z); rho column-major 2^n x 2^n. */                    \
  void pauli_mix_dm(cd* rho, std::size_t n, std::uint64_t x, std::uint64_t z, double p);                     \
  /* xi[s] = prod_q mats[q][outcomes[s*n+q]], a 1x1 result per shot. */                                     \
  void contract_selectors(const SelectorTensors& t, const std::uint8_t* outcomes, std::size_t shots, double* xi);

namespace serial {
DUTEM_KERNEL_DECLS
}
namespace parallel {
DUTEM_KERNEL_DECLS
}

#undef DUTEM_KERNEL_DECLS

void set_threads(int threads);
int max_threads();

}  // namespace dutem::kernels

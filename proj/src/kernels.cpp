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

#include "dutem/kernels.hpp"

#include <bit>

#include <omp.h>

namespace dutem::kernels {

namespace {

inline std::size_t insert_zero(std::size_t k, std::size_t bit) {
  const std::size_t low = k & ((std::size_t{1} << bit) - 1);
  return ((k >> bit) << (bit + 1)) | low;
}

inline void apply_1q_at(cd* psi, std::size_t k, std::size_t q, const Eigen::Matrix2cd& m) {
  const std::size_t i0 = insert_zero(k, q);
  const std::size_t i1 = i0 | (std::size_t{1} << q);
  const cd a = psi[i0], b = psi[i1];
  psi[i0] = m(0, 0) * a + m(0, 1) * b;
  psi[i1] = m(1, 0) * a + m(1, 1) * b;
}

inline void apply_2q_at(cd* psi, std::size_t k, std::size_t q0, std::size_t q1, const Eigen::Matrix4cd& m) {
  const std::size_t lo = q0 < q1 ? q0 : q1, hi = q0 < q1 ? q1 : q0;
  const std::size_t base = insert_zero(insert_zero(k, lo), hi);
  const std::size_t b0 = std::size_t{1} << q0, b1 = std::size_t{1} << q1;
  const std::size_t idx[4] = {base, base | b1, base | b0, base | b0 | b1};
  cd v[4];
  for (int r = 0; r < 4; ++r) v[r] = psi[idx[r]];
  for (int r = 0; r < 4; ++r) psi[idx[r]] = m(r, 0) * v[0] + m(r, 1) * v[1] + m(r, 2) * v[2] + m(r, 3) * v[3];
}

inline double mix_sign(std::size_t k, std::size_t n, std::uint64_t z) {
  const std::size_t r = k & ((std::size_t{1} << n) - 1);
  const std::size_t c = k >> n;
  return (std::popcount(z & r) + std::popcount(z & c)) % 2 ? -1.0 : 1.0;
}

inline void mix_at(cd* rho, std::size_t i, std::size_t n, std::uint64_t xx, std::uint64_t z, double p) {
  const std::size_t j = i ^ xx;
  if (j < i) return;
  if (j == i) {
    rho[i] *= (1.0 - p) + p * mix_sign(i, n, z);
    return;
  }
  const cd a = rho[i], b = rho[j];
  rho[i] = (1.0 - p) * a + p * mix_sign(j, n, z) * b;
  rho[j] = (1.0 - p) * b + p * mix_sign(i, n, z) * a;
}

inline double contract_one(const SelectorTensors& t, const std::uint8_t* out) {
  const std::size_t n = t.mats.size();
  Eigen::RowVectorXd v = t.mats[0][out[0]].row(0);
  for (std::size_t q = 1; q < n; ++q) v = v * t.mats[q][out[q]];
  return v(0);
}

}  // namespace

namespace serial {

void apply_1q(cd* psi, std::size_t n, std::size_t q, const Eigen::Matrix2cd& m) {
  const std::size_t count = std::size_t{1} << (n - 1);
  for (std::size_t k = 0; k < count; ++k) apply_1q_at(psi, k, q, m);
}

void apply_2q(cd* psi, std::size_t n, std::size_t q0, std::size_t q1, const Eigen::Matrix4cd& m) {
  const std::size_t count = std::size_t{1} << (n - 2);
  for (std::size_t k = 0; k < count; ++k) apply_2q_at(psi, k, q0, q1, m);
}

void pauli_mix_dm(cd* rho, std::size_t n, std::uint64_t x, std::uint64_t z, double p) {
  const std::size_t dim = std::size_t{1} << (2 * n);
  const std::uint64_t xx = x | (x << n);
  for (std::size_t i = 0; i < dim; ++i) mix_at(rho, i, n, xx, z, p);
}

void contract_selectors(const SelectorTensors& t, const std::uint8_t* outcomes, std::size_t shots, double* xi) {
  const std::size_t n = t.mats.size();
  for (std::size_t s = 0; s < shots; ++s) xi[s] = contract_one(t, outcomes + s * n);
}

}  // namespace serial

namespace parallel {

void apply_1q(cd* psi, std::size_t n, std::size_t q, const Eigen::Matrix2cd& m) {
  const auto count = static_cast<std::int64_t>(std::size_t{1} << (n - 1));
#pragma omp parallel for schedule(static) if (count > 4096)
  for (std::int64_t k = 0; k < count; ++k) apply_1q_at(psi, static_cast<std::size_t>(k), q, m);
}

void apply_2q(cd* psi, std::size_t n, std::size_t q0, std::size_t q1, const Eigen::Matrix4cd& m) {
  const auto count = static_cast<std::int64_t>(std::size_t{1} << (n - 2));
#pragma omp parallel for schedule(static) if (count > 4096)
  for (std::int64_t k = 0; k < count; ++k) apply_2q_at(psi, static_cast<std::size_t>(k), q0, q1, m);
}

void pauli_mix_dm(cd* rho, std::size_t n, std::uint64_t x, std::uint64_t z, double p) {
  const auto dim = static_cast<std::int64_t>(std::size_t{1} << (2 * n));
  const std::uint64_t xx = x | (x << n);
  // Pairs (i, i^xx) are disjoint, so iterations touching them never collide.
#pragma omp parallel for schedule(static) if (dim > 4096)
  for (std::int64_t i = 0; i < dim; ++i) mix_at(rho, static_cast<std::size_t>(i), n, xx, z, p);
}

void contract_selectors(const SelectorTensors& t, const std::uint8_t* outcomes, std::size_t shots, double* xi) {
  const std::size_t n = t.mats.size();
  const auto count = static_cast<std::int64_t>(shots);
#pragma omp parallel for schedule(static) if (count > 256)
  for (std::int64_t s = 0; s < count; ++s) xi[s] = contract_one(t, outcomes + static_cast<std::size_t>(s) * n);
}

}  // namespace parallel

void set_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace dutem::kernels

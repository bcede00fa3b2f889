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

// Independent dense reference implementations used as test oracles. Nothing
// here calls into the library except for plain data types.
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Eigen::Matrix2cd letter_matrix(char c) {
  Eigen::Matrix2cd m;
  const cd i(0, 1);
  switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1;
  }
  return m;
}

// Embeds a k-qubit operator acting on `qubits` (first listed qubit is the most
// significant local bit) into n qubits; qubit q is bit q of the global index.
inline Mat embed(std::size_t n, const std::vector<std::size_t>& qubits, const Mat& op) {
  const std::size_t dim = std::size_t{1} << n, k = qubits.size();
  Mat out = Mat::Zero(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t in_local = 0;
    for (std::size_t j = 0; j < k; ++j) in_local |= ((col >> qubits[j]) & 1u) << (k - 1 - j);
    for (std::size_t out_local = 0; out_local < (std::size_t{1} << k); ++out_local) {
      std::size_t row = col;
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t bit = (out_local >> (k - 1 - j)) & 1u;
        row = (row & ~(std::size_t{1} << qubits[j])) | (bit << qubits[j]);
      }
      out(row, col) += op(out_local, in_local);
    }
  }
  return out;
}

// Dense Pauli from letters indexed by qubit ("XIZ" puts X on qubit 0).
inline Mat pauli(const std::string& letters) {
  const std::size_t n = letters.size();
  Mat m = Mat::Identity(std::size_t{1} << n, std::size_t{1} << n);
  for (std::size_t q = 0; q < n; ++q) {
    if (letters[q] != 'I') m = embed(n, {q}, letter_matrix(letters[q])) * m;
  }
  return m;
}

// exp(-i H) for Hermitian H.
inline Mat expi(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const Eigen::VectorXd ev = es.eigenvalues();
  Vec ph(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) ph(k) = std::exp(cd(0, -ev(k)));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

// Column-stacking superoperator of rho -> A rho B.
inline Mat sandwich(const Mat& a, const Mat& b) {
  return Eigen::kroneckerProduct(b.transpose(), a).eval();
}

inline Vec vec(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }
inline Mat unvec(const Vec& v, Eigen::Index d) { return Eigen::Map<const Mat>(v.data(), d, d); }

// exp(L) with L(rho) = sum_k rates_k (P_k rho P_k - rho), by matrix exponential.
inline Mat lindblad_superop(const std::vector<std::string>& gens, const std::vector<double>& rates) {
  const std::size_t n = gens.front().size();
  const Eigen::Index d = Eigen::Index{1} << n;
  Mat l = Mat::Zero(d * d, d * d);
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const Mat p = pauli(gens[k]);
    l += rates[k] * (sandwich(p, p) - Mat::Identity(d * d, d * d));
  }
  return l.exp();
}

// Letters of PTM index alpha with qubit 0 most significant.
inline std::string ptm_letters(std::size_t alpha, std::size_t n) {
  std::string s(n, 'I');
  for (std::size_t q = 0; q < n; ++q) s[q] = "IXYZ"[(alpha >> (2 * (n - 1 - q))) & 3u];
  return s;
}

// R_ab = Tr[P_a E(P_b)] / 2^n for a column-stacking superoperator.
inline Eigen::MatrixXd ptm(const Mat& superop, std::size_t n) {
  const std::size_t dim = std::size_t{1} << (2 * n);
  const Eigen::Index d = Eigen::Index{1} << n;
  Eigen::MatrixXd r(dim, dim);
  std::vector<Mat> ps;
  for (std::size_t a = 0; a < dim; ++a) ps.push_back(pauli(ptm_letters(a, n)));
  for (std::size_t b = 0; b < dim; ++b) {
    const Mat out = unvec(superop * vec(ps[b]), d);
    for (std::size_t a = 0; a < dim; ++a) r(a, b) = (ps[a] * out).trace().real() / static_cast<double>(d);
  }
  return r;
}

inline Mat unitary_superop(const Mat& u) { return sandwich(u, u.adjoint()); }

}  // namespace oracle

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

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace dutem {

using cd = std::complex<double>;

// A one- or two-qubit unitary. For two qubits the local basis index is
// 2*bit(qubits[0]) + bit(qubits[1]), i.e. the first listed qubit is the
// most significant factor of the Kronecker product.
struct Gate {
  std::vector<std::size_t> qubits;
  Eigen::MatrixXcd matrix;

  std::size_t arity() const { return qubits.size(); }
  bool is_unitary(double tol = 1e-12) const;
  Gate adjoint() const;
  // Same operator with qubits listed in ascending order.
  Gate sorted() const;
};

namespace gates {
Eigen::Matrix2cd pauli(int letter);  // 0=I 1=X 2=Y 3=Z
Eigen::Matrix2cd hadamard();
Eigen::Matrix2cd phase_s();
Eigen::Matrix4cd cz();
Eigen::Matrix4cd cnot();  // control is the first qubit
Eigen::Matrix4cd swap();
Gate single(std::size_t q, const Eigen::Matrix2cd& m);
Gate pair(std::size_t q0, std::size_t q1, const Eigen::Matrix4cd& m);
}  // namespace gates

}  // namespace dutem

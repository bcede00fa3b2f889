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

#include "dutem/gate.hpp"

#include <algorithm>

#include "dutem/error.hpp"

namespace dutem {

bool Gate::is_unitary(double tol) const {
  const auto d = matrix.rows();
  if (matrix.cols() != d) return false;
  return (matrix * matrix.adjoint() - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() <= tol;
}

Gate Gate::adjoint() const { return Gate{qubits, matrix.adjoint()}; }

Gate Gate::sorted() const {
  if (qubits.size() != 2 || qubits[0] < qubits[1]) return *this;
  Eigen::Matrix4cd s = gates::swap();
  return Gate{{qubits[1], qubits[0]}, s * matrix * s};
}

namespace gates {

Eigen::Matrix2cd pauli(int letter) {
  Eigen::Matrix2cd m;
  const cd i(0, 1);
  switch (letter) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -i, i, 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw InvalidArgument("pauli letter out of range");
  }
  return m;
}

Eigen::Matrix2cd hadamard() {
  Eigen::Matrix2cd m;
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

Eigen::Matrix2cd phase_s() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, cd(0, 1);
  return m;
}

Eigen::Matrix4cd cz() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
  m(3, 3) = -1;
  return m;
}

Eigen::Matrix4cd cnot() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = m(1, 1) = 1;
  m(2, 3) = m(3, 2) = 1;
  return m;
}

Eigen::Matrix4cd swap() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = m(3, 3) = 1;
  m(1, 2) = m(2, 1) = 1;
  return m;
}

Gate single(std::size_t q, const Eigen::Matrix2cd& m) { return Gate{{q}, m}; }

Gate pair(std::size_t q0, std::size_t q1, const Eigen::Matrix4cd& m) {
  if (q0 == q1) throw InvalidArgument("two-qubit gate on a single qubit");
  return Gate{{q0, q1}, m};
}

}  // namespace gates
}  // namespace dutem

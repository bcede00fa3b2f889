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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dutem/gate.hpp"

namespace dutem {

enum class PauliLetter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char letter_char(PauliLetter p);
PauliLetter letter_from_char(char c);

// Signed n-qubit Pauli operator i^phase * (x) sigma_q, stored as bit masks.
// Letters: X=(x=1,z=0), Y=(1,1), Z=(0,1).
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::size_t n);

  static PauliString single(std::size_t n, std::size_t q, PauliLetter p);
  static PauliString two(std::size_t n, std::size_t q0, PauliLetter p0, std::size_t q1, PauliLetter p1);
  // "+XIZZ", "-Y", "+iXX", "-iZ"; the sign prefix is optional.
  static PauliString from_text(std::string_view text);
  // "+XZ@(3,4)" style; letters listed in the same order as sites.
  static PauliString from_sparse_text(std::size_t n, std::string_view text);

  std::size_t n_qubits() const { return n_; }
  PauliLetter letter(std::size_t q) const;
  void set(std::size_t q, PauliLetter p);

  // Exponent k of the global phase i^k.
  int phase() const { return phase_; }
  void set_phase(int k) { phase_ = static_cast<std::uint8_t>(((k % 4) + 4) % 4); }
  bool is_hermitian() const { return phase_ % 2 == 0; }
  // +1 or -1 for a Hermitian string; throws otherwise.
  int sign() const;
  PauliString unsigned_copy() const;

  std::size_t weight() const;
  bool is_identity() const;  // ignores phase
  std::vector<std::size_t> support() const;

  std::string to_text() const;
  std::string to_sparse_text() const;

  const std::vector<std::uint64_t>& x_words() const { return x_; }
  const std::vector<std::uint64_t>& z_words() const { return z_; }

  // Operator equality including phase.
  bool operator==(const PauliString& o) const = default;

  // Dense 2^n x 2^n matrix (little-endian: qubit q is bit q of the index).
  Eigen::MatrixXcd dense() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> x_, z_;
  std::uint8_t phase_ = 0;

  friend PauliString multiply(const PauliString& a, const PauliString& b);
};

PauliString multiply(const PauliString& a, const PauliString& b);
inline PauliString operator*(const PauliString& a, const PauliString& b) { return multiply(a, b); }
bool anticommutes(const PauliString& a, const PauliString& b);

// Ordering and equality on the operator up to phase; used as map key.
struct PauliLess {
  bool operator()(const PauliString& a, const PauliString& b) const;
};
bool same_up_to_phase(const PauliString& a, const PauliString& b);

// Weight-1 and nearest-neighbour weight-2 strings on an open chain.
// Order: all single-site strings (site ascending, X<Y<Z) then pairs by left
// site, lexicographic over {X,Y,Z}^2.
class SparseBasis {
 public:
  explicit SparseBasis(std::size_t n);

  static std::size_t expected_size(std::size_t n) { return n == 0 ? 0 : 3 * n + 9 * (n - 1); }
  std::size_t n_qubits() const { return n_; }
  std::size_t size() const { return entries_.size(); }
  const PauliString& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<PauliString>& entries() const { return entries_; }
  std::optional<std::size_t> index_of(const PauliString& p) const;

 private:
  std::size_t n_;
  std::vector<PauliString> entries_;
  std::map<PauliString, std::size_t, PauliLess> index_;
};

// Clifford unitary U stored as the images U X_q U^dag and U Z_q U^dag.
class CliffordLayer {
 public:
  static CliffordLayer identity(std::size_t n);
  // Throws NotClifford if a gate does not map Paulis to signed Paulis.
  static CliffordLayer from_gates(std::size_t n, const std::vector<Gate>& gates);
  static CliffordLayer hadamard(std::size_t n, std::size_t q);
  static CliffordLayer phase(std::size_t n, std::size_t q);
  static CliffordLayer cz(std::size_t n, std::size_t a, std::size_t b);
  static CliffordLayer cnot(std::size_t n, std::size_t control, std::size_t target);

  std::size_t n_qubits() const { return n_; }
  const PauliString& image_x(std::size_t q) const { return xs_[q]; }
  const PauliString& image_z(std::size_t q) const { return zs_[q]; }

  // U p U^dag with sign tracked.
  PauliString conjugate(const PauliString& p) const;
  // Apply this layer first, then `next`.
  CliffordLayer then(const CliffordLayer& next) const;
  bool is_symplectic() const;

 private:
  std::size_t n_ = 0;
  std::vector<PauliString> xs_, zs_;
};

using BinaryMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// M_ij = [P_i, P_j anticommute]; M'_ij = [U P_i U^dag, P_j anticommute].
std::pair<BinaryMatrix, BinaryMatrix> build_anticommutation_matrices(const SparseBasis& basis,
                                                                    const CliffordLayer& layer);

}  // namespace dutem

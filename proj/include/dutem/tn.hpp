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
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dutem/circuits.hpp"
#include "dutem/noise.hpp"

namespace dutem::tn {

struct CompressionPolicy {
  enum class Kind { cutoff, max_bond };
  Kind kind = Kind::cutoff;
  // Keep the smallest k with sum_{j>k} s_j^2 / sum_j s_j^2 < cutoff.
  double cutoff = 1e-12;
  std::size_t max_bond = std::numeric_limits<std::size_t>::max();

  static CompressionPolicy relative_cutoff(double eps, std::size_t chi = std::numeric_limits<std::size_t>::max()) {
    return {Kind::cutoff, eps, chi};
  }
  static CompressionPolicy hard_cap(std::size_t chi) { return {Kind::max_bond, 0.0, chi}; }
  // Only numerically zero singular values are dropped.
  static CompressionPolicy exact() { return {Kind::cutoff, 0.0, std::numeric_limits<std::size_t>::max()}; }
};

struct TruncationRecord {
  std::size_t bond = 0;     // bond between sites bond-1 and bond
  std::size_t before = 0;   // singular values available
  std::size_t after = 0;    // kept
  double discarded = 0.0;   // discarded squared weight relative to the total
};

struct TruncationLog {
  std::vector<TruncationRecord> records;
  void append(const TruncationLog& o) { records.insert(records.end(), o.records.begin(), o.records.end()); }
  double total_discarded() const;
  double max_discarded() const;
  std::size_t max_kept() const;
};

// Site tensor, row-major [left][phys][right].
template <class T>
struct Tensor3 {
  std::size_t l = 1, d = 1, r = 1;
  std::vector<T> data;

  Tensor3() = default;
  Tensor3(std::size_t l_, std::size_t d_, std::size_t r_) : l(l_), d(d_), r(r_), data(l_ * d_ * r_, T(0)) {}
  T& operator()(std::size_t a, std::size_t p, std::size_t c) { return data[(a * d + p) * r + c]; }
  const T& operator()(std::size_t a, std::size_t p, std::size_t c) const { return data[(a * d + p) * r + c]; }
};

template <class T>
class Mps {
 public:
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  Mps() = default;
  Mps(std::size_t n, std::size_t d);
  static Mps product(const std::vector<std::vector<T>>& local);

  std::size_t size() const { return sites_.size(); }
  std::size_t phys_dim() const { return d_; }
  std::size_t bond(std::size_t b) const;  // b in [0, n]
  std::size_t max_bond() const;
  Tensor3<T>& site(std::size_t q) { return sites_[q]; }
  const Tensor3<T>& site(std::size_t q) const { return sites_[q]; }
  void set_site(std::size_t q, Tensor3<T> t);

  // Orthogonality center, or -1 if the gauge is unknown.
  int center() const { return center_; }
  void canonicalize(std::size_t q);
  bool is_canonical(double tol = 1e-10) const;

  void apply_one_site(std::size_t q, const Matrix& op);
  // op acts on the combined index p_q * d + p_{q+1}; center ends on q+1.
  void apply_two_site(std::size_t q, const Matrix& op, const CompressionPolicy& policy, TruncationLog* log = nullptr);
  TruncationLog compress(const CompressionPolicy& policy);

  // Sum over physical indices of this * other (no conjugation).
  T dot(const Mps& other) const;
  // <this|other> with this conjugated.
  T inner(const Mps& other) const;
  double norm() const;
  void scale(T s);
  T component(const std::vector<std::size_t>& phys) const;

  // Schmidt values on every interior bond (n-1 entries).
  std::vector<std::vector<double>> schmidt_spectra() const;
  // von Neumann entropy in bits per interior bond.
  std::vector<double> bond_entropies() const;
  double max_entropy() const;

  Vector to_dense() const;  // site 0 most significant

 private:
  std::size_t d_ = 0;
  std::vector<Tensor3<T>> sites_;
  int center_ = -1;

  void left_step(std::size_t q);
  void right_step(std::size_t q);
};

extern template class Mps<double>;
extern template class Mps<std::complex<double>>;

using PtmMps = Mps<double>;
using StateMps = Mps<std::complex<double>>;

// Superoperator in the Pauli transfer matrix basis, stored as an MPS with
// physical index out*4 + in (d = 16).
class PtmMpo {
 public:
  PtmMpo() = default;
  explicit PtmMpo(Mps<double> m);
  static PtmMpo identity(std::size_t n);
  static PtmMpo from_diagonal(const PtmDiagonal& d);

  std::size_t size() const { return m_.size(); }
  std::size_t bond(std::size_t b) const { return m_.bond(b); }
  std::size_t max_bond() const { return m_.max_bond(); }
  const Mps<double>& mps() const { return m_; }
  Mps<double>& mps() { return m_; }

  // Row/column index sum_q a_q 4^(n-1-q).
  Eigen::MatrixXd to_dense() const;
  // this o right, bonds multiply.
  PtmMpo compose(const PtmMpo& right) const;
  PtmMpo transpose() const;
  TruncationLog compress(const CompressionPolicy& policy) { return m_.compress(policy); }

  // this <- U o this o U^-1 for every gate of the layer.
  void conjugate_layer(const Layer& l, const CompressionPolicy& policy, TruncationLog* log = nullptr);
  // this <- this o D (D diagonal, acting on the input index).
  void right_multiply_diagonal(const PtmDiagonal& d, const CompressionPolicy& policy, TruncationLog* log = nullptr);

 private:
  Mps<double> m_;
};

Eigen::Matrix4d gate_ptm_1q(const Eigen::Matrix2cd& u);
// Index 4*a(q0) + a(q1) on both sides.
Eigen::Matrix<double, 16, 16> gate_ptm_2q(const Eigen::Matrix4cd& u);

PtmMpo mpo_from_layer(const Layer& l, std::size_t n, bool inverse = false);
PtmMpo mpo_multiply_compress(const PtmMpo& a, const PtmMpo& b, const CompressionPolicy& policy,
                             TruncationLog* log = nullptr);
// y = M x and y = M^T x, compressed.
PtmMps apply(const PtmMpo& m, const PtmMps& x, const CompressionPolicy& policy, TruncationLog* log = nullptr);
PtmMps apply_transpose(const PtmMpo& m, const PtmMps& x, const CompressionPolicy& policy, TruncationLog* log = nullptr);

// Observable coefficients (phys I,X,Y,Z) and initial-state Pauli expectations.
PtmMps pauli_mps(const PauliString& p);
PtmMps initial_state_ptm(const InitialState& s, std::size_t n);
StateMps initial_state_mps(const InitialState& s, std::size_t n);

// Diagonal Pauli channel acting on a coefficient vector (self-adjoint).
void apply_diagonal(PtmMps& x, const PtmDiagonal& d, const CompressionPolicy& policy, TruncationLog* log = nullptr);

struct EvolutionResult {
  TruncationLog log;
  std::vector<double> max_entropy_per_layer;
};

StateMps schrodinger_evolve(const BrickworkCircuit& c, const CompressionPolicy& policy, EvolutionResult* info = nullptr);
double state_expectation(const StateMps& psi, const PauliString& p);

// Backward-evolved observable; with `noise`, each layer's channel is applied
// after the layer's adjoint action.
PtmMps heisenberg_evolve(const BrickworkCircuit& c, const PauliString& o, const CompressionPolicy& policy,
                         const NoiseModel* noise = nullptr, EvolutionResult* info = nullptr);
double heisenberg_expectation(const BrickworkCircuit& c, const PauliString& o, const CompressionPolicy& policy,
                              const NoiseModel* noise = nullptr, EvolutionResult* info = nullptr);

// Zero the X and Y components on every site.
PtmMps project_iz(const PtmMps& x);

struct ConvergenceReport {
  std::vector<double> chis;
  std::vector<double> values;
  std::vector<double> successive_differences;  // |v_i - v_{i-1}|, first entry 0
  double extrapolated = 0;                     // linear fit in 1/chi
  std::vector<double> delta_chi;               // |v_chi - extrapolated|
  std::vector<double> entropies;               // max bond entropy per run
  std::vector<double> projected_entropies;     // I/Z-projected variant
};
// Points with chi >= chi_bar enter the extrapolation (all by default).
ConvergenceReport convergence_report(const std::vector<double>& chis, const std::vector<double>& values,
                                     const std::vector<double>& entropies = {},
                                     const std::vector<double>& projected_entropies = {}, double chi_bar = 0);

struct TemOptions {
  CompressionPolicy policy = CompressionPolicy::hard_cap(64);
  // When set, gates outside the backward light cone of this site are dropped
  // together with their noise before building the map.
  std::optional<std::size_t> light_cone_site;
};

struct TemMap {
  PtmMpo mpo;
  std::size_t layers = 0;
  CompressionPolicy policy;
  TruncationLog log;
};

TemMap build_tem_map(const BrickworkCircuit& c, const NoiseModel& noise, const TemOptions& opts);
// MPS of M^dag(O).
PtmMps modify_observable(const TemMap& map, const PauliString& o);
// Coefficient of O itself in M^dag(O).
double leading_coefficient(const PtmMps& modified, const PauliString& o);

// Binary snapshots: magic "DTNS", format version, kind, sizes, bonds and
// row-major little-endian float64 payloads.
void save_snapshot(std::ostream& os, const Mps<double>& m, bool is_mpo);
Mps<double> load_snapshot(std::istream& is, bool* is_mpo = nullptr);
void save_snapshot(const std::string& path, const Mps<double>& m, bool is_mpo);
Mps<double> load_snapshot(const std::string& path, bool* is_mpo = nullptr);

}  // namespace dutem::tn

#include "dutem/measurement.hpp"

namespace dutem::tn {
// Shot estimate of Tr[rho M^dag(O)].
Estimate mitigated_estimate(const std::vector<ShotRecord>& records, const TemMap& map, const PauliString& o,
                            const std::vector<BasisDistribution>& dists, const std::vector<double>& calibration = {});
}  // namespace dutem::tn

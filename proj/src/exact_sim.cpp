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

#include "dutem/exact_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "dutem/error.hpp"
#include "dutem/kernels.hpp"

namespace dutem {

namespace {

// P|c> = coeff |row>
struct PauliAction {
  std::uint64_t x = 0, z = 0;
  int base_phase = 0;  // phase + number of Y factors

  explicit PauliAction(const PauliString& p) {
    if (p.n_qubits() > 0) {
      x = p.x_words()[0];
      z = p.z_words()[0];
    }
    base_phase = p.phase() + std::popcount(x & z);
  }
  cd coeff(std::uint64_t c) const {
    static const cd powers[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
    return powers[(base_phase + 2 * (std::popcount(z & c) % 2)) % 4];
  }
};

void check_cap(std::size_t n, std::size_t cap, const char* what) {
  if (n > cap) {
    throw SimulationCapExceeded(std::string(what) + " limited to " + std::to_string(cap) + " qubits, got " +
                                std::to_string(n));
  }
}

}  // namespace

double analytic_correlator(double h, std::size_t n, std::size_t t) {
  if (n != t) return 0.0;
  return std::pow(std::cos(2.0 * h), static_cast<double>(t));
}

Eigen::Matrix4d transfer_map_mu(const KickedIsingParams& p) {
  if (!p.is_dual_unitary()) throw InvalidArgument("transfer map needs dual-unitary parameters");
  const Eigen::Matrix4cd u = two_qubit_block(p);
  Eigen::Matrix4d m;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      Eigen::Matrix4cd in = Eigen::Matrix4cd::Zero();
      Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
      const Eigen::Matrix2cd sa = gates::pauli(a), sb = gates::pauli(b), id = Eigen::Matrix2cd::Identity();
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
          in.block<2, 2>(2 * r, 2 * c) = id(r, c) * sb;
          out.block<2, 2>(2 * r, 2 * c) = sa(r, c) * id;
        }
      m(a, b) = (out * u * in * u.adjoint()).trace().real() / 4.0;
    }
  }
  return m;
}

double transfer_map_correlator(const KickedIsingParams& p, std::size_t n) {
  Eigen::Matrix4d m = transfer_map_mu(p);
  Eigen::Vector4d v(0, 1, 0, 0);
  for (std::size_t k = 0; k < n; ++k) v = m * v;
  // <+|sigma|+> is 1 for I and X, 0 otherwise.
  return v(0) + v(1);
}

Statevector::Statevector(std::size_t n) : n_(n) {
  check_cap(n, kStatevectorCap, "statevector simulation");
  amps_ = Eigen::VectorXcd::Zero(std::size_t{1} << n);
  amps_(0) = 1.0;
}

Statevector Statevector::prepare(const InitialState& s, std::size_t n) {
  s.validate(n);
  Statevector psi(n);
  switch (s.kind) {
    case InitialState::Kind::zeros: break;
    case InitialState::Kind::plus_bell: psi.apply(state_prep_layer(n)); break;
    case InitialState::Kind::pauli_eigenstate: {
      const auto supp = s.pauli.support();
      for (auto q : supp) {
        const auto l = s.pauli.letter(q);
        if (q == supp.front() && s.pauli.sign() < 0) psi.apply(gates::single(q, gates::pauli(1)));
        if (l == PauliLetter::X || l == PauliLetter::Y) psi.apply(gates::single(q, gates::hadamard()));
        if (l == PauliLetter::Y) psi.apply(gates::single(q, gates::phase_s()));
      }
      break;
    }
  }
  return psi;
}

void Statevector::apply(const Gate& g) {
  for (auto q : g.qubits) {
    if (q >= n_) throw InvalidArgument("gate qubit out of range");
  }
  if (g.arity() == 1) {
    kernels::parallel::apply_1q(amps_.data(), n_, g.qubits[0], g.matrix);
  } else if (g.arity() == 2) {
    kernels::parallel::apply_2q(amps_.data(), n_, g.qubits[0], g.qubits[1], g.matrix);
  } else {
    throw InvalidArgument("only one- and two-qubit gates are supported");
  }
}

void Statevector::apply(const Layer& l) {
  for (const auto& g : l.gates) apply(g);
}

void Statevector::apply_pauli(const PauliString& p) {
  if (p.n_qubits() != n_) throw SizeMismatch("pauli size mismatch");
  PauliAction a(p);
  Eigen::VectorXcd out(amps_.size());
  for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(amps_.size()); ++c) out(c ^ a.x) = a.coeff(c) * amps_(c);
  amps_.swap(out);
}

double Statevector::expectation(const PauliString& p) const {
  if (p.n_qubits() != n_) throw SizeMismatch("pauli size mismatch");
  PauliAction a(p);
  cd s = 0;
  for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(amps_.size()); ++c) {
    s += std::conj(amps_(c ^ a.x)) * a.coeff(c) * amps_(c);
  }
  return s.real();
}

DensityMatrix::DensityMatrix(const Statevector& psi) : n_(psi.n_qubits()) {
  check_cap(n_, kDensityMatrixCap, "density-matrix simulation");
  rho_ = psi.amplitudes() * psi.amplitudes().adjoint();
}

void DensityMatrix::apply(const Gate& g) {
  if (g.arity() == 1) {
    kernels::parallel::apply_1q(rho_.data(), 2 * n_, g.qubits[0], g.matrix);
    kernels::parallel::apply_1q(rho_.data(), 2 * n_, g.qubits[0] + n_, g.matrix.conjugate());
  } else if (g.arity() == 2) {
    kernels::parallel::apply_2q(rho_.data(), 2 * n_, g.qubits[0], g.qubits[1], g.matrix);
    kernels::parallel::apply_2q(rho_.data(), 2 * n_, g.qubits[0] + n_, g.qubits[1] + n_, g.matrix.conjugate());
  } else {
    throw InvalidArgument("only one- and two-qubit gates are supported");
  }
}

void DensityMatrix::apply(const Layer& l) {
  for (const auto& g : l.gates) apply(g);
}

void DensityMatrix::apply(const PauliLindbladChannel& ch) {
  if (ch.n_qubits() != n_) throw SizeMismatch("channel size mismatch");
  for (std::size_t j = 0; j < ch.size(); ++j) {
    const auto& g = ch.generators()[j];
    kernels::parallel::pauli_mix_dm(rho_.data(), n_, g.x_words()[0], g.z_words()[0], ch.jump_probability(j));
  }
}

double DensityMatrix::expectation(const PauliString& p) const {
  if (p.n_qubits() != n_) throw SizeMismatch("pauli size mismatch");
  PauliAction a(p);
  cd s = 0;
  for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(rho_.rows()); ++c) s += rho_(c, c ^ a.x) * a.coeff(c);
  return s.real();
}

Statevector final_statevector(const BrickworkCircuit& c) {
  Statevector psi = Statevector::prepare(c.initial, c.n_qubits);
  for (const auto& l : c.layers) psi.apply(l);
  return psi;
}

double statevector_expectation(const BrickworkCircuit& c, const PauliString& observable) {
  return final_statevector(c).expectation(observable);
}

DensityMatrix final_density_matrix(const BrickworkCircuit& c, const NoiseModel& noise) {
  check_cap(c.n_qubits, kDensityMatrixCap, "density-matrix simulation");
  DensityMatrix rho(Statevector::prepare(c.initial, c.n_qubits));
  for (const auto& l : c.layers) {
    rho.apply(noise[l.noise_slot]);
    rho.apply(l);
  }
  return rho;
}

double noisy_expectation_dm(const BrickworkCircuit& c, const NoiseModel& noise, const PauliString& observable) {
  return final_density_matrix(c, noise).expectation(observable);
}

MonteCarloEstimate trajectory_expectation(const BrickworkCircuit& c, const NoiseModel& noise, const PauliString& observable,
                                          std::size_t trajectories, std::mt19937_64& rng) {
  const Statevector start = Statevector::prepare(c.initial, c.n_qubits);
  double s = 0, s2 = 0;
  for (std::size_t k = 0; k < trajectories; ++k) {
    Statevector psi = start;
    for (const auto& l : c.layers) {
      psi.apply_pauli(noise[l.noise_slot].sample_error(rng));
      psi.apply(l);
    }
    const double v = psi.expectation(observable);
    s += v;
    s2 += v * v;
  }
  const double m = s / trajectories;
  const double var = trajectories > 1 ? (s2 - trajectories * m * m) / (trajectories - 1) : 0.0;
  return {m, std::sqrt(std::max(var, 0.0) / trajectories)};
}

PropagationResult pauli_propagation(const BrickworkCircuit& c, const NoiseModel& noise, const PauliString& observable) {
  if (observable.n_qubits() != c.n_qubits) throw SizeMismatch("observable size mismatch");
  PauliString o = observable;
  double fid = 1.0;
  PropagationResult r;
  for (std::size_t k = c.layers.size(); k-- > 0;) {
    const Layer& l = c.layers[k];
    std::vector<Gate> adj;
    adj.reserve(l.gates.size());
    for (const auto& g : l.gates) adj.push_back(g.adjoint());
    o = CliffordLayer::from_gates(c.n_qubits, adj).conjugate(o);
    const PauliString u = o.unsigned_copy();
    fid *= noise[l.noise_slot].fidelity(u);
    r.path.push_back({k, l.noise_slot, u});
  }
  std::reverse(r.path.begin(), r.path.end());
  r.ideal = c.initial.pauli_expectation(o);
  r.value = fid * r.ideal;
  return r;
}

double infinite_temperature_correlator(const BrickworkCircuit& c, const PauliString& observable) {
  const std::size_t n = c.n_qubits;
  check_cap(n, 10, "infinite-temperature brute force");
  const std::size_t dim = std::size_t{1} << n;
  cd total = 0;
  for (std::size_t b = 0; b < dim; ++b) {
    Statevector u(n), v(n);
    u.amplitudes().setZero();
    v.amplitudes().setZero();
    u.amplitudes()(b) = 1.0;
    v.amplitudes()(b ^ 1u) = 1.0;  // X_0 |b>
    for (const auto& l : c.layers) {
      u.apply(l);
      v.apply(l);
    }
    // <b| X_0 U^dag O U |b> = <U X_0 b| O |U b>
    Statevector ou = u;
    ou.apply_pauli(observable);
    total += v.amplitudes().dot(ou.amplitudes());
  }
  return total.real() / static_cast<double>(dim);
}

}  // namespace dutem

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

#include "dutem/circuits.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "dutem/error.hpp"
#include "json.hpp"

namespace dutem {

std::string to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

Parity parity_from_string(const std::string& s) {
  if (s == "even") return Parity::even;
  if (s == "odd") return Parity::odd;
  throw InvalidArgument("parity must be 'even' or 'odd', got '" + s + "'");
}

bool KickedIsingParams::is_dual_unitary(double tol) const {
  const double q = std::numbers::pi / 4;
  return std::abs(std::abs(J) - q) <= tol && std::abs(std::abs(b) - q) <= tol;
}

bool KickedIsingParams::is_clifford(double tol) const { return is_dual_unitary(tol) && std::abs(h) <= tol; }

void KickedIsingParams::validate() const {
  if (n_qubits % 2 == 0) throw InvalidArgument("kicked-Ising chain needs an odd number of qubits");
}

InitialState InitialState::eigenstate(const PauliString& p) {
  if (!p.is_hermitian()) throw InvalidArgument("eigenstate needs a Hermitian pauli string");
  return {Kind::pauli_eigenstate, p};
}

void InitialState::validate(std::size_t n) const {
  if (kind == Kind::plus_bell && n % 2 == 0) throw InvalidArgument("plus_bell state needs odd qubit count");
  if (kind == Kind::pauli_eigenstate) {
    if (pauli.n_qubits() != n) throw SizeMismatch("eigenstate pauli size mismatch");
    if (!pauli.is_hermitian()) throw InvalidArgument("eigenstate needs a Hermitian pauli string");
  }
}

double InitialState::pauli_expectation(const PauliString& p) const {
  if (!p.is_hermitian()) throw InvalidArgument("expectation of a non-Hermitian pauli string");
  const std::size_t n = p.n_qubits();
  double v = p.sign();
  switch (kind) {
    case Kind::zeros:
      for (std::size_t q = 0; q < n; ++q) {
        const auto l = p.letter(q);
        if (l == PauliLetter::X || l == PauliLetter::Y) return 0.0;
      }
      return v;
    case Kind::plus_bell: {
      const auto l0 = p.letter(0);
      if (l0 == PauliLetter::Y || l0 == PauliLetter::Z) return 0.0;
      // (|00>+|11>)/sqrt2 has <XX>=1, <YY>=-1, <ZZ>=1
      for (std::size_t q = 1; q + 1 < n; q += 2) {
        const auto a = p.letter(q), c = p.letter(q + 1);
        if (a != c) return 0.0;
        if (a == PauliLetter::Y) v = -v;
      }
      return v;
    }
    case Kind::pauli_eigenstate: {
      if (pauli.n_qubits() != n) throw SizeMismatch("eigenstate pauli size mismatch");
      // Single-site eigenstates with eigenvalue +1, except the first support
      // site which carries the sign of the prepared string.
      for (std::size_t q = 0; q < n; ++q) {
        const auto l = p.letter(q);
        const auto s = pauli.letter(q);
        if (l == PauliLetter::I) continue;
        if (s == PauliLetter::I) {
          if (l != PauliLetter::Z) return 0.0;
          continue;
        }
        if (l != s) return 0.0;
      }
      const auto supp = pauli.support();
      if (!supp.empty() && p.letter(supp.front()) != PauliLetter::I) v *= pauli.sign();
      return v;
    }
  }
  return 0.0;
}

bool BrickworkCircuit::all_clifford() const {
  for (const auto& l : layers) {
    if (!l.clifford) return false;
  }
  return true;
}

Eigen::Matrix4cd two_qubit_block(const KickedIsingParams& p) {
  const cd i(0, 1);
  Eigen::Matrix4cd zz = Eigen::Matrix4cd::Zero();
  Eigen::Matrix4cd hz = Eigen::Matrix4cd::Zero();
  for (int k = 0; k < 4; ++k) {
    const double z1 = (k & 2) ? -1.0 : 1.0;
    const double z2 = (k & 1) ? -1.0 : 1.0;
    zz(k, k) = std::exp(-i * p.J * z1 * z2);
    hz(k, k) = std::exp(-i * p.h * z1);
  }
  Eigen::Matrix2cd kick;
  kick << std::cos(p.b), -i * std::sin(p.b), -i * std::sin(p.b), std::cos(p.b);
  Eigen::Matrix4cd kk;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) kk.block<2, 2>(2 * r, 2 * c) = kick(r, c) * kick;
  return hz * zz * kk * zz * hz;
}

Eigen::Matrix4cd reshuffle(const Eigen::Matrix4cd& u) {
  Eigen::Matrix4cd r;
  // <k l|R|i j> = <j l|U|i k>
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) r(2 * k + l, 2 * i + j) = u(2 * j + l, 2 * i + k);
  return r;
}

bool is_dual_unitary_gate(const Eigen::Matrix4cd& u, double tol) {
  Eigen::Matrix4cd r = reshuffle(u);
  return (r * r.adjoint() - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() <= tol;
}

bool is_clifford_gate(const Gate& g) {
  std::size_t n = 0;
  for (auto q : g.qubits) n = std::max(n, q + 1);
  try {
    CliffordLayer::from_gates(n, {g});
    return true;
  } catch (const NotClifford&) {
    return false;
  }
}

Layer make_layer(std::size_t n, Parity parity, const Eigen::Matrix4cd& block, Parity slot) {
  Layer l;
  l.parity = parity;
  l.noise_slot = slot;
  l.label = to_string(parity);
  for (std::size_t q = parity == Parity::even ? 0 : 1; q + 1 < n; q += 2) l.gates.push_back(gates::pair(q, q + 1, block));
  l.clifford = l.gates.empty() || is_clifford_gate(l.gates.front());
  return l;
}

Layer state_prep_layer(std::size_t n) {
  Layer l;
  l.parity = Parity::odd;
  l.noise_slot = Parity::odd;
  l.clifford = true;
  l.label = "prep";
  l.gates.push_back(gates::single(0, gates::hadamard()));
  Eigen::Matrix4cd hi = Eigen::Matrix4cd::Zero();
  const Eigen::Matrix2cd h = gates::hadamard();
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) hi.block<2, 2>(2 * r, 2 * c) = h(r, c) * Eigen::Matrix2cd::Identity();
  const Eigen::Matrix4cd bell = gates::cnot() * hi;
  for (std::size_t q = 1; q + 1 < n; q += 2) l.gates.push_back(gates::pair(q, q + 1, bell));
  return l;
}

BrickworkCircuit build_brickwork(const KickedIsingParams& p, const BrickworkOptions& opts) {
  p.validate();
  BrickworkCircuit c;
  c.n_qubits = p.n_qubits;
  c.params = p;
  const Eigen::Matrix4cd u = two_qubit_block(p);
  if (opts.state_prep_layer) {
    c.initial = InitialState::zeros();
    c.layers.push_back(state_prep_layer(p.n_qubits));
  } else {
    c.initial = InitialState::plus_bell();
  }
  for (std::size_t t = 0; t < p.t_steps; ++t) {
    const Parity par = t % 2 == 0 ? Parity::even : Parity::odd;
    c.layers.push_back(make_layer(p.n_qubits, par, u, par));
  }
  return c;
}

BrickworkCircuit build_cycle_benchmark(const Layer& layer, std::size_t n, const PauliString& prepared,
                                       std::size_t depth) {
  if (depth % 2 != 0) throw InvalidArgument("cycle-benchmark depth must be even");
  if (prepared.n_qubits() != n) throw SizeMismatch("prepared pauli size mismatch");
  BrickworkCircuit c;
  c.n_qubits = n;
  c.initial = InitialState::eigenstate(prepared);
  for (std::size_t d = 0; d < depth; ++d) c.layers.push_back(layer);
  c.observables.push_back(prepared);
  return c;
}

BrickworkCircuit build_repeated_layer_benchmark(Parity parity, std::size_t cycles, std::size_t n) {
  const double q = std::numbers::pi / 4;
  const Eigen::Matrix4cd u = two_qubit_block({q, q, 0.0, n, 0});
  BrickworkCircuit c;
  c.n_qubits = n;
  const std::size_t first = parity == Parity::even ? 0 : 1;
  PauliString prep(n);
  for (std::size_t i = first; i < n; i += 2) prep.set(i, PauliLetter::X);
  c.initial = InitialState::eigenstate(prep);
  for (std::size_t t = 0; t < cycles; ++t) c.layers.push_back(make_layer(n, parity, u, parity));
  // Each layer moves X to the block partner; idle qubits keep it.
  for (std::size_t i = first; i < n; i += 2) {
    const bool paired = i + 1 < n;
    const std::size_t image = paired && cycles % 2 == 1 ? i + 1 : i;
    c.observables.push_back(PauliString::single(n, image, PauliLetter::X));
  }
  return c;
}

BrickworkCircuit build_mirror_circuit(const KickedIsingParams& p, std::size_t T) {
  if (!p.is_clifford()) throw InvalidArgument("mirror circuits are built at the Clifford point only");
  KickedIsingParams fwd = p;
  fwd.t_steps = T;
  BrickworkCircuit c = build_brickwork(fwd, {.state_prep_layer = true});
  const std::size_t forward = c.layers.size();
  for (std::size_t k = forward; k-- > 0;) {
    Layer inv = c.layers[k];
    for (auto& g : inv.gates) g = g.adjoint();
    inv.label += "_inv";
    c.layers.push_back(inv);
  }
  for (std::size_t q = 0; q < p.n_qubits; ++q) c.observables.push_back(PauliString::single(p.n_qubits, q, PauliLetter::Z));
  return c;
}

BrickworkCircuit light_cone_restrict(const BrickworkCircuit& c, std::size_t site) {
  BrickworkCircuit out = c;
  std::set<std::size_t> cone{site};
  for (std::size_t k = c.layers.size(); k-- > 0;) {
    std::vector<Gate> kept;
    for (const auto& g : c.layers[k].gates) {
      bool hit = false;
      for (auto q : g.qubits) hit = hit || cone.count(q);
      if (!hit) continue;
      kept.push_back(g);
    }
    for (const auto& g : kept) cone.insert(g.qubits.begin(), g.qubits.end());
    out.layers[k].gates = std::move(kept);
  }
  return out;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json rr = nlohmann::json::array(), ri = nlohmann::json::array();
    for (int k = 0; k < m.cols(); ++k) {
      rr.push_back(m(r, k).real());
      ri.push_back(m(r, k).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"re", re}, {"im", im}};
}

Eigen::MatrixXcd matrix_from_json(const nlohmann::json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  Eigen::MatrixXcd m(re.size(), re.size());
  for (std::size_t r = 0; r < re.size(); ++r)
    for (std::size_t k = 0; k < re[r].size(); ++k) m(r, k) = cd(re[r][k].get<double>(), im[r][k].get<double>());
  return m;
}

std::string kind_name(InitialState::Kind k) {
  switch (k) {
    case InitialState::Kind::plus_bell: return "plus_bell";
    case InitialState::Kind::zeros: return "zeros";
    default: return "pauli_eigenstate";
  }
}

}  // namespace

nlohmann::json circuit_to_json(const BrickworkCircuit& c) {
  nlohmann::json j;
  j["n_qubits"] = c.n_qubits;
  j["initial"] = {{"kind", kind_name(c.initial.kind)}};
  if (c.initial.kind == InitialState::Kind::pauli_eigenstate) j["initial"]["pauli"] = c.initial.pauli.to_text();
  if (c.params) {
    j["params"] = {{"J", c.params->J}, {"b", c.params->b}, {"h", c.params->h},
                   {"n_qubits", c.params->n_qubits}, {"t_steps", c.params->t_steps}};
  }
  j["layers"] = nlohmann::json::array();
  for (const auto& l : c.layers) {
    nlohmann::json lj{{"parity", to_string(l.parity)}, {"noise_slot", to_string(l.noise_slot)},
                      {"clifford", l.clifford}, {"label", l.label}, {"gates", nlohmann::json::array()}};
    for (const auto& g : l.gates) lj["gates"].push_back({{"qubits", g.qubits}, {"matrix", matrix_to_json(g.matrix)}});
    j["layers"].push_back(lj);
  }
  j["observables"] = nlohmann::json::array();
  for (const auto& o : c.observables) j["observables"].push_back(o.to_text());
  return j;
}

BrickworkCircuit circuit_from_json(const nlohmann::json& j) {
  BrickworkCircuit c;
  c.n_qubits = j.at("n_qubits").get<std::size_t>();
  const std::string kind = j.at("initial").at("kind");
  if (kind == "plus_bell") c.initial = InitialState::plus_bell();
  else if (kind == "zeros") c.initial = InitialState::zeros();
  else if (kind == "pauli_eigenstate") c.initial = InitialState::eigenstate(PauliString::from_text(j["initial"].at("pauli").get<std::string>()));
  else throw InvalidArgument("unknown initial state kind '" + kind + "'");
  if (j.contains("params")) {
    const auto& p = j["params"];
    c.params = KickedIsingParams{p.at("J"), p.at("b"), p.at("h"), p.at("n_qubits"), p.at("t_steps")};
  }
  for (const auto& lj : j.at("layers")) {
    Layer l;
    l.parity = parity_from_string(lj.at("parity"));
    l.noise_slot = parity_from_string(lj.at("noise_slot"));
    l.clifford = lj.value("clifford", false);
    l.label = lj.value("label", "");
    for (const auto& gj : lj.at("gates")) {
      Gate g{gj.at("qubits").get<std::vector<std::size_t>>(), matrix_from_json(gj.at("matrix"))};
      if (!g.is_unitary(1e-10)) throw InvalidArgument("circuit json holds a non-unitary gate");
      l.gates.push_back(std::move(g));
    }
    c.layers.push_back(std::move(l));
  }
  for (const auto& o : j.value("observables", nlohmann::json::array())) c.observables.push_back(PauliString::from_text(o.get<std::string>()));
  c.initial.validate(c.n_qubits);
  return c;
}

}  // namespace dutem

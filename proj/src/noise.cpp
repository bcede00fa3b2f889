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

#include "dutem/noise.hpp"

#include <cmath>
#include <functional>

#include "dutem/error.hpp"

namespace dutem {

PauliLindbladChannel::PauliLindbladChannel(std::size_t n, std::vector<PauliString> generators, std::vector<double> rates,
                                           Parity slot)
    : n_(n), generators_(std::move(generators)), rates_(std::move(rates)), slot_(slot) {
  if (generators_.size() != rates_.size()) throw SizeMismatch("generator and rate counts differ");
  for (auto& g : generators_) {
    if (g.n_qubits() != n_) throw SizeMismatch("generator size differs from channel size");
    if (g.is_identity()) throw InvalidArgument("identity generator");
    g = g.unsigned_copy();
  }
}

PauliLindbladChannel PauliLindbladChannel::sparse(const SparseBasis& basis, std::vector<double> rates, Parity slot) {
  if (rates.size() != basis.size()) throw SizeMismatch("rate vector does not match sparse basis");
  return PauliLindbladChannel(basis.n_qubits(), basis.entries(), std::move(rates), slot);
}

PauliLindbladChannel PauliLindbladChannel::zero(std::size_t n, Parity slot) { return PauliLindbladChannel(n, {}, {}, slot); }

bool PauliLindbladChannel::physical() const {
  for (double r : rates_) {
    if (r < 0) return false;
  }
  return true;
}

bool PauliLindbladChannel::is_sparse() const {
  for (const auto& g : generators_) {
    const auto s = g.support();
    if (s.size() > 2 || (s.size() == 2 && s[1] != s[0] + 1)) return false;
  }
  return true;
}

double PauliLindbladChannel::total_rate() const {
  double t = 0;
  for (double r : rates_) t += r;
  return t;
}

double PauliLindbladChannel::fidelity(const PauliString& p) const {
  if (p.n_qubits() != n_) throw SizeMismatch("pauli size differs from channel size");
  double s = 0;
  for (std::size_t j = 0; j < generators_.size(); ++j) {
    if (anticommutes(generators_[j], p)) s += rates_[j];
  }
  return std::exp(-2.0 * s);
}

PauliLindbladChannel PauliLindbladChannel::inverse() const {
  std::vector<double> r = rates_;
  for (auto& x : r) x = -x;
  return PauliLindbladChannel(n_, generators_, std::move(r), slot_);
}

PauliLindbladChannel PauliLindbladChannel::compose(const PauliLindbladChannel& other) const {
  if (other.n_ != n_) throw SizeMismatch("channels of different size");
  std::map<PauliString, double, PauliLess> acc;
  std::vector<PauliString> order;
  auto add = [&](const PauliLindbladChannel& c) {
    for (std::size_t j = 0; j < c.size(); ++j) {
      auto [it, fresh] = acc.emplace(c.generators_[j], 0.0);
      if (fresh) order.push_back(c.generators_[j]);
      it->second += c.rates_[j];
    }
  };
  add(*this);
  add(other);
  std::vector<double> rates;
  for (const auto& g : order) rates.push_back(acc[g]);
  return PauliLindbladChannel(n_, order, rates, slot_);
}

double PauliLindbladChannel::jump_probability(std::size_t j) const {
  return 0.5 * (1.0 - std::exp(-2.0 * rates_.at(j)));
}

PauliString PauliLindbladChannel::sample_error(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PauliString e(n_);
  for (std::size_t j = 0; j < generators_.size(); ++j) {
    if (rates_[j] < 0) throw InvalidArgument("cannot sample a channel with negative rates");
    if (u(rng) < jump_probability(j)) e = multiply(e, generators_[j]);
  }
  return e.unsigned_copy();
}

NoiseModel NoiseModel::noiseless(std::size_t n) {
  return {PauliLindbladChannel::zero(n, Parity::even), PauliLindbladChannel::zero(n, Parity::odd)};
}

double PauliFidelitySet::pair(const PauliString& p) const {
  return std::sqrt(values.at(p) * conjugate_values.at(p));
}

PauliFidelitySet fidelity_set(const PauliLindbladChannel& ch, const SparseBasis& basis, const CliffordLayer& layer) {
  PauliFidelitySet s;
  for (const auto& p : basis.entries()) {
    s.values[p] = ch.fidelity(p);
    s.conjugate_values[p] = ch.fidelity(layer.conjugate(p).unsigned_copy());
  }
  return s;
}

double PtmDiagonal::value(const PauliString& p) const {
  double v = 1.0;
  for (std::size_t j = 0; j < generators.size(); ++j) {
    if (anticommutes(generators[j], p)) v *= anticommute_values[j];
  }
  return v;
}

Eigen::VectorXd PtmDiagonal::dense() const {
  if (n_qubits > 7) throw SimulationCapExceeded("dense PTM diagonal limited to 7 qubits");
  const std::size_t dim = std::size_t{1} << (2 * n_qubits);
  Eigen::VectorXd d(dim);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    PauliString p(n_qubits);
    for (std::size_t q = 0; q < n_qubits; ++q) p.set(q, static_cast<PauliLetter>((idx >> (2 * (n_qubits - 1 - q))) & 3u));
    d(idx) = value(p);
  }
  return d;
}

PtmDiagonal ptm_diagonal(const PauliLindbladChannel& ch) {
  PtmDiagonal d;
  d.n_qubits = ch.n_qubits();
  d.generators = ch.generators();
  for (double r : ch.rates()) d.anticommute_values.push_back(std::exp(-2.0 * r));
  return d;
}

namespace {

Eigen::MatrixXcd local_pauli(const std::vector<int>& letters) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Ones(1, 1);
  for (int l : letters) {
    Eigen::Matrix2cd s = gates::pauli(l);
    Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = m(r, c) * s;
    m = next;
  }
  return m;
}

TwirlDressing dressing(const Layer& layer, std::size_t n, const std::function<int()>& draw) {
  TwirlDressing t{PauliString(n), {}};
  std::vector<bool> covered(n, false);
  for (const auto& g : layer.gates) {
    std::vector<int> letters;
    for (auto q : g.qubits) {
      const int l = draw();
      letters.push_back(l);
      t.before.set(q, static_cast<PauliLetter>(l));
      covered[q] = true;
    }
    t.after.push_back(Gate{g.qubits, g.matrix * local_pauli(letters) * g.matrix.adjoint()});
  }
  for (std::size_t q = 0; q < n; ++q) {
    if (covered[q]) continue;
    const int l = draw();
    t.before.set(q, static_cast<PauliLetter>(l));
    if (l != 0) t.after.push_back(gates::single(q, gates::pauli(l)));
  }
  return t;
}

}  // namespace

TwirlDressing twirl_layer(const Layer& layer, std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(0, 3);
  return dressing(layer, n, [&] { return d(rng); });
}

TwirlDressing identity_twirl(const Layer& layer, std::size_t n) {
  return dressing(layer, n, [] { return 0; });
}

nlohmann::json channel_to_json(const PauliLindbladChannel& ch) {
  nlohmann::json j;
  j["layer_id"] = to_string(ch.slot());
  j["n_qubits"] = ch.n_qubits();
  j["entries"] = nlohmann::json::array();
  for (std::size_t k = 0; k < ch.size(); ++k) {
    j["entries"].push_back({{"pauli", ch.generators()[k].to_sparse_text()}, {"rate", ch.rates()[k]}});
  }
  return j;
}

PauliLindbladChannel channel_from_json(const nlohmann::json& j, std::size_t n) {
  if (j.contains("n_qubits") && j["n_qubits"].get<std::size_t>() != n) throw SizeMismatch("noise model qubit count mismatch");
  std::vector<PauliString> gens;
  std::vector<double> rates;
  for (const auto& e : j.at("entries")) {
    gens.push_back(PauliString::from_sparse_text(n, e.at("pauli").get<std::string>()));
    rates.push_back(e.at("rate").get<double>());
  }
  return PauliLindbladChannel(n, gens, rates, parity_from_string(j.at("layer_id").get<std::string>()));
}

nlohmann::json noise_model_to_json(const NoiseModel& m) {
  return {{"n_qubits", m.even.n_qubits()}, {"channels", {channel_to_json(m.even), channel_to_json(m.odd)}}};
}

NoiseModel noise_model_from_json(const nlohmann::json& j, std::size_t n) {
  NoiseModel m = NoiseModel::noiseless(n);
  for (const auto& c : j.at("channels")) {
    auto ch = channel_from_json(c, n);
    m[ch.slot()] = ch;
  }
  return m;
}

}  // namespace dutem

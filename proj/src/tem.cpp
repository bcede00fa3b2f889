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

#include <set>

#include "dutem/error.hpp"
#include "dutem/tn.hpp"

namespace dutem::tn {

namespace {

// Qubits inside the backward light cone of `site` at the input of each layer.
std::vector<std::set<std::size_t>> cone_per_layer(const BrickworkCircuit& c, std::size_t site) {
  std::vector<std::set<std::size_t>> cones(c.layers.size());
  std::set<std::size_t> cone{site};
  for (std::size_t k = c.layers.size(); k-- > 0;) {
    for (const auto& g : c.layers[k].gates) {
      bool hit = false;
      for (auto q : g.qubits) hit = hit || cone.count(q);
      if (hit) cone.insert(g.qubits.begin(), g.qubits.end());
    }
    cones[k] = cone;
  }
  return cones;
}

PtmDiagonal restrict(const PtmDiagonal& d, const std::set<std::size_t>& qubits) {
  PtmDiagonal out;
  out.n_qubits = d.n_qubits;
  for (std::size_t j = 0; j < d.generators.size(); ++j) {
    // A generator acts on the operator only if it overlaps the cone.
    bool touches = false;
    for (auto q : d.generators[j].support()) touches = touches || qubits.count(q);
    if (!touches) continue;
    out.generators.push_back(d.generators[j]);
    out.anticommute_values.push_back(d.anticommute_values[j]);
  }
  return out;
}

}  // namespace

TemMap build_tem_map(const BrickworkCircuit& c, const NoiseModel& noise, const TemOptions& opts) {
  const BrickworkCircuit circ = opts.light_cone_site ? light_cone_restrict(c, *opts.light_cone_site) : c;
  std::vector<std::set<std::size_t>> cones;
  if (opts.light_cone_site) cones = cone_per_layer(c, *opts.light_cone_site);
  const NoiseModel inv = noise.inverse();
  const PtmDiagonal inv_even = ptm_diagonal(inv.even);
  const PtmDiagonal inv_odd = ptm_diagonal(inv.odd);

  TemMap map{PtmMpo::identity(c.n_qubits), 0, opts.policy, {}};
  for (std::size_t k = 0; k < circ.layers.size(); ++k) {
    const Layer& l = circ.layers[k];
    PtmDiagonal d = l.noise_slot == Parity::even ? inv_even : inv_odd;
    if (opts.light_cone_site) d = restrict(d, cones[k]);
    // M_l = U_l o M_{l-1} o Lambda_l^-1 o U_l^-1
    map.mpo.right_multiply_diagonal(d, opts.policy, &map.log);
    map.mpo.conjugate_layer(l, opts.policy, &map.log);
    ++map.layers;
  }
  return map;
}

PtmMps modify_observable(const TemMap& map, const PauliString& o) {
  if (o.n_qubits() != map.mpo.size()) throw SizeMismatch("observable size differs from map");
  return apply_transpose(map.mpo, pauli_mps(o), CompressionPolicy::exact());
}

double leading_coefficient(const PtmMps& modified, const PauliString& o) {
  std::vector<std::size_t> idx(o.n_qubits());
  for (std::size_t q = 0; q < o.n_qubits(); ++q) idx[q] = static_cast<std::size_t>(o.letter(q));
  return modified.component(idx) * o.sign();
}

Estimate mitigated_estimate(const std::vector<ShotRecord>& records, const TemMap& map, const PauliString& o,
                            const std::vector<BasisDistribution>& dists, const std::vector<double>& calibration) {
  return estimate(records, modify_observable(map, o), dists, calibration);
}

}  // namespace dutem::tn

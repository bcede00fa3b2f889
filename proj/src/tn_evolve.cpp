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

#include <algorithm>
#include <cmath>

#include "dutem/error.hpp"
#include "dutem/tn.hpp"

namespace dutem::tn {

namespace {

using Mat = Eigen::MatrixXd;

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd m;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m.block<2, 2>(2 * r, 2 * c) = a(r, c) * b;
  return m;
}

void check_real(double imag) {
  if (std::abs(imag) > 1e-10) throw InvalidArgument("PTM entry is not real");
}

// Combined MPO physical index.
inline int pm(int out, int in) { return out * 4 + in; }

Gate adjacent(const Gate& g0) {
  Gate g = g0.sorted();
  if (g.arity() == 2 && g.qubits[1] != g.qubits[0] + 1) {
    throw InvalidArgument("tensor-network engine needs nearest-neighbour gates");
  }
  return g;
}

struct BondDiagonals {
  std::vector<Eigen::VectorXd> bonds;  // 16 entries per bond, index 4*a_q + a_{q+1}
  std::vector<bool> nontrivial;
  Eigen::Vector4d single = Eigen::Vector4d::Ones();  // used only for n == 1
};

BondDiagonals group_by_bond(const PtmDiagonal& d) {
  const std::size_t n = d.n_qubits;
  BondDiagonals out;
  const std::size_t nb = n > 1 ? n - 1 : 0;
  out.bonds.assign(nb, Eigen::VectorXd::Ones(16));
  out.nontrivial.assign(nb, false);
  for (std::size_t j = 0; j < d.generators.size(); ++j) {
    const auto& g = d.generators[j];
    const auto supp = g.support();
    if (supp.empty()) continue;
    if (supp.size() > 2 || (supp.size() == 2 && supp[1] != supp[0] + 1)) {
      throw InvalidArgument("tensor-network engine needs sparse (nearest-neighbour) generators");
    }
    const double v = d.anticommute_values[j];
    if (n == 1) {
      for (int a = 0; a < 4; ++a) {
        if (anticommutes(g, PauliString::single(1, 0, static_cast<PauliLetter>(a)))) out.single(a) *= v;
      }
      continue;
    }
    const std::size_t q = std::min(supp[0], n - 2);
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        const PauliString p = PauliString::two(n, q, static_cast<PauliLetter>(a), q + 1, static_cast<PauliLetter>(b));
        if (anticommutes(g, p)) out.bonds[q](4 * a + b) *= v;
      }
    }
    out.nontrivial[q] = true;
  }
  return out;
}

}  // namespace

Eigen::Matrix4d gate_ptm_1q(const Eigen::Matrix2cd& u) {
  Eigen::Matrix4d r;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const cd v = (gates::pauli(a) * u * gates::pauli(b) * u.adjoint()).trace() / 2.0;
      check_real(v.imag());
      r(a, b) = v.real();
    }
  return r;
}

Eigen::Matrix<double, 16, 16> gate_ptm_2q(const Eigen::Matrix4cd& u) {
  Eigen::Matrix<double, 16, 16> r;
  Eigen::Matrix4cd p[16];
  for (int a = 0; a < 16; ++a) p[a] = kron2(gates::pauli(a / 4), gates::pauli(a % 4));
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) {
      const cd v = (p[a] * u * p[b] * u.adjoint()).trace() / 4.0;
      check_real(v.imag());
      r(a, b) = v.real();
    }
  return r;
}

PtmMpo::PtmMpo(Mps<double> m) : m_(std::move(m)) {
  if (m_.phys_dim() != 16) throw SizeMismatch("PTM MPO needs physical dimension 16");
}

PtmMpo PtmMpo::identity(std::size_t n) {
  std::vector<double> id(16, 0.0);
  for (int a = 0; a < 4; ++a) id[pm(a, a)] = 1.0;
  return PtmMpo(Mps<double>::product(std::vector<std::vector<double>>(n, id)));
}

PtmMpo PtmMpo::from_diagonal(const PtmDiagonal& d) {
  PtmMpo m = identity(d.n_qubits);
  m.right_multiply_diagonal(d, CompressionPolicy::exact());
  return m;
}

Eigen::MatrixXd PtmMpo::to_dense() const {
  const std::size_t n = size();
  if (n > 6) throw SimulationCapExceeded("dense PTM limited to 6 qubits");
  const Eigen::VectorXd v = m_.to_dense();
  const std::size_t dim = std::size_t{1} << (2 * n);
  Eigen::MatrixXd out(dim, dim);
  for (std::size_t idx = 0; idx < static_cast<std::size_t>(v.size()); ++idx) {
    std::size_t o = 0, i = 0, rest = idx;
    std::size_t scale = 1;
    for (std::size_t q = n; q-- > 0;) {
      const std::size_t p = rest % 16;
      rest /= 16;
      o += (p / 4) * scale;
      i += (p % 4) * scale;
      scale *= 4;
    }
    out(o, i) = v(idx);
  }
  return out;
}

PtmMpo PtmMpo::compose(const PtmMpo& right) const {
  if (right.size() != size()) throw SizeMismatch("MPO sizes differ");
  Mps<double> out(size(), 16);
  for (std::size_t q = 0; q < size(); ++q) {
    const auto& a = m_.site(q);
    const auto& b = right.m_.site(q);
    Tensor3<double> c(a.l * b.l, 16, a.r * b.r);
    for (std::size_t al = 0; al < a.l; ++al)
      for (std::size_t bl = 0; bl < b.l; ++bl)
        for (std::size_t ar = 0; ar < a.r; ++ar)
          for (std::size_t br = 0; br < b.r; ++br)
            for (int o = 0; o < 4; ++o)
              for (int i = 0; i < 4; ++i) {
                double s = 0;
                for (int k = 0; k < 4; ++k) s += a(al, pm(o, k), ar) * b(bl, pm(k, i), br);
                c(al * b.l + bl, pm(o, i), ar * b.r + br) = s;
              }
    out.set_site(q, std::move(c));
  }
  return PtmMpo(std::move(out));
}

PtmMpo PtmMpo::transpose() const {
  PtmMpo t = *this;
  for (std::size_t q = 0; q < size(); ++q) {
    const auto& a = m_.site(q);
    Tensor3<double> b(a.l, 16, a.r);
    for (std::size_t l = 0; l < a.l; ++l)
      for (std::size_t r = 0; r < a.r; ++r)
        for (int o = 0; o < 4; ++o)
          for (int i = 0; i < 4; ++i) b(l, pm(i, o), r) = a(l, pm(o, i), r);
    t.m_.set_site(q, std::move(b));
  }
  return t;
}

void PtmMpo::conjugate_layer(const Layer& l, const CompressionPolicy& policy, TruncationLog* log) {
  for (const auto& g0 : l.gates) {
    const Gate g = adjacent(g0);
    if (g.arity() == 1) {
      const Eigen::Matrix4d r = gate_ptm_1q(g.matrix);
      Mat op(16, 16);
      for (int o = 0; o < 4; ++o)
        for (int i = 0; i < 4; ++i)
          for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) op(pm(o, i), pm(a, b)) = r(o, a) * r(i, b);  // R^-1 = R^T
      m_.apply_one_site(g.qubits[0], op);
      continue;
    }
    const Eigen::Matrix<double, 16, 16> r = gate_ptm_2q(g.matrix);
    Mat op(256, 256);
    for (int o1 = 0; o1 < 4; ++o1)
      for (int i1 = 0; i1 < 4; ++i1)
        for (int o2 = 0; o2 < 4; ++o2)
          for (int i2 = 0; i2 < 4; ++i2) {
            const int row = pm(o1, i1) * 16 + pm(o2, i2);
            for (int a1 = 0; a1 < 4; ++a1)
              for (int b1 = 0; b1 < 4; ++b1)
                for (int a2 = 0; a2 < 4; ++a2)
                  for (int b2 = 0; b2 < 4; ++b2) {
                    op(row, pm(a1, b1) * 16 + pm(a2, b2)) = r(4 * o1 + o2, 4 * a1 + a2) * r(4 * i1 + i2, 4 * b1 + b2);
                  }
          }
    m_.apply_two_site(g.qubits[0], op, policy, log);
  }
}

void PtmMpo::right_multiply_diagonal(const PtmDiagonal& d, const CompressionPolicy& policy, TruncationLog* log) {
  if (d.n_qubits != size()) throw SizeMismatch("diagonal size differs from MPO");
  const BondDiagonals bd = group_by_bond(d);
  if (size() == 1) {
    Mat op = Mat::Zero(16, 16);
    for (int o = 0; o < 4; ++o)
      for (int i = 0; i < 4; ++i) op(pm(o, i), pm(o, i)) = bd.single(i);
    m_.apply_one_site(0, op);
    return;
  }
  for (std::size_t q = 0; q < bd.bonds.size(); ++q) {
    if (!bd.nontrivial[q]) continue;
    Mat op = Mat::Zero(256, 256);
    for (int o1 = 0; o1 < 4; ++o1)
      for (int i1 = 0; i1 < 4; ++i1)
        for (int o2 = 0; o2 < 4; ++o2)
          for (int i2 = 0; i2 < 4; ++i2) {
            const int k = pm(o1, i1) * 16 + pm(o2, i2);
            op(k, k) = bd.bonds[q](4 * i1 + i2);
          }
    m_.apply_two_site(q, op, policy, log);
  }
}

void apply_diagonal(PtmMps& x, const PtmDiagonal& d, const CompressionPolicy& policy, TruncationLog* log) {
  if (d.n_qubits != x.size()) throw SizeMismatch("diagonal size differs from MPS");
  const BondDiagonals bd = group_by_bond(d);
  if (x.size() == 1) {
    x.apply_one_site(0, Mat(bd.single.asDiagonal()));
    return;
  }
  for (std::size_t q = 0; q < bd.bonds.size(); ++q) {
    if (!bd.nontrivial[q]) continue;
    x.apply_two_site(q, Mat(bd.bonds[q].asDiagonal()), policy, log);
  }
}

PtmMpo mpo_from_layer(const Layer& l, std::size_t n, bool inverse) {
  PtmMpo m = PtmMpo::identity(n);
  std::vector<bool> used(n, false);
  for (const auto& g0 : l.gates) {
    const Gate g = adjacent(g0);
    for (auto q : g.qubits) {
      if (q >= n) throw InvalidArgument("gate qubit out of range");
      if (used[q]) throw InvalidArgument("overlapping gate supports in one layer");
      used[q] = true;
    }
    if (g.arity() == 1) {
      Eigen::Matrix4d r = gate_ptm_1q(g.matrix);
      if (inverse) r.transposeInPlace();
      Mat op = Mat::Zero(16, 16);
      for (int o = 0; o < 4; ++o)
        for (int i = 0; i < 4; ++i)
          for (int a = 0; a < 4; ++a) op(pm(o, i), pm(a, i)) = r(o, a);
      m.mps().apply_one_site(g.qubits[0], op);
      continue;
    }
    Eigen::Matrix<double, 16, 16> r = gate_ptm_2q(g.matrix);
    if (inverse) r.transposeInPlace();
    Mat op = Mat::Zero(256, 256);
    for (int o1 = 0; o1 < 4; ++o1)
      for (int i1 = 0; i1 < 4; ++i1)
        for (int o2 = 0; o2 < 4; ++o2)
          for (int i2 = 0; i2 < 4; ++i2)
            for (int a1 = 0; a1 < 4; ++a1)
              for (int a2 = 0; a2 < 4; ++a2) {
                op(pm(o1, i1) * 16 + pm(o2, i2), pm(a1, i1) * 16 + pm(a2, i2)) = r(4 * o1 + o2, 4 * a1 + a2);
              }
    m.mps().apply_two_site(g.qubits[0], op, CompressionPolicy::exact());
  }
  return m;
}

PtmMpo mpo_multiply_compress(const PtmMpo& a, const PtmMpo& b, const CompressionPolicy& policy, TruncationLog* log) {
  PtmMpo c = a.compose(b);
  TruncationLog l = c.compress(policy);
  if (log) log->append(l);
  return c;
}

PtmMps apply(const PtmMpo& m, const PtmMps& x, const CompressionPolicy& policy, TruncationLog* log) {
  if (m.size() != x.size() || x.phys_dim() != 4) throw SizeMismatch("MPO/MPS shapes differ");
  PtmMps y(x.size(), 4);
  for (std::size_t q = 0; q < x.size(); ++q) {
    const auto& a = m.mps().site(q);
    const auto& b = x.site(q);
    Tensor3<double> c(a.l * b.l, 4, a.r * b.r);
    for (std::size_t al = 0; al < a.l; ++al)
      for (std::size_t bl = 0; bl < b.l; ++bl)
        for (std::size_t ar = 0; ar < a.r; ++ar)
          for (std::size_t br = 0; br < b.r; ++br)
            for (int o = 0; o < 4; ++o) {
              double s = 0;
              for (int i = 0; i < 4; ++i) s += a(al, pm(o, i), ar) * b(bl, i, br);
              c(al * b.l + bl, o, ar * b.r + br) = s;
            }
    y.set_site(q, std::move(c));
  }
  TruncationLog l = y.compress(policy);
  if (log) log->append(l);
  return y;
}

PtmMps apply_transpose(const PtmMpo& m, const PtmMps& x, const CompressionPolicy& policy, TruncationLog* log) {
  return apply(m.transpose(), x, policy, log);
}

PtmMps pauli_mps(const PauliString& p) {
  if (!p.is_hermitian()) throw InvalidArgument("observable must be Hermitian");
  std::vector<std::vector<double>> local(p.n_qubits(), std::vector<double>(4, 0.0));
  for (std::size_t q = 0; q < p.n_qubits(); ++q) local[q][static_cast<int>(p.letter(q))] = 1.0;
  local[0][static_cast<int>(p.letter(0))] = p.sign();
  return PtmMps::product(local);
}

PtmMps initial_state_ptm(const InitialState& s, std::size_t n) {
  s.validate(n);
  std::vector<std::vector<double>> local(n, std::vector<double>{1, 0, 0, 1});
  switch (s.kind) {
    case InitialState::Kind::zeros: return PtmMps::product(local);
    case InitialState::Kind::pauli_eigenstate: {
      const auto supp = s.pauli.support();
      for (auto q : supp) {
        local[q] = {1, 0, 0, 0};
        local[q][static_cast<int>(s.pauli.letter(q))] = q == supp.front() ? s.pauli.sign() : 1.0;
      }
      return PtmMps::product(local);
    }
    case InitialState::Kind::plus_bell: {
      local[0] = {1, 1, 0, 0};
      PtmMps m = PtmMps::product(local);
      const double bell[4] = {1, 1, -1, 1};
      for (std::size_t q = 1; q + 1 < n; q += 2) {
        Tensor3<double> a(1, 4, 4), b(4, 4, 1);
        for (int k = 0; k < 4; ++k) {
          a(0, k, k) = 1.0;
          b(k, k, 0) = bell[k];
        }
        m.set_site(q, a);
        m.set_site(q + 1, b);
      }
      return m;
    }
  }
  return PtmMps::product(local);
}

StateMps initial_state_mps(const InitialState& s, std::size_t n) {
  s.validate(n);
  using C = std::complex<double>;
  std::vector<std::vector<C>> local(n, std::vector<C>{1, 0});
  if (s.kind == InitialState::Kind::pauli_eigenstate) {
    const auto supp = s.pauli.support();
    const double r = 1.0 / std::sqrt(2.0);
    for (auto q : supp) {
      const double e = q == supp.front() ? s.pauli.sign() : 1.0;
      switch (s.pauli.letter(q)) {
        case PauliLetter::X: local[q] = {r, e * r}; break;
        case PauliLetter::Y: local[q] = {r, C(0, e * r)}; break;
        default: local[q] = e > 0 ? std::vector<C>{1, 0} : std::vector<C>{0, 1}; break;
      }
    }
  }
  StateMps m = StateMps::product(local);
  if (s.kind == InitialState::Kind::plus_bell) {
    for (const auto& g : state_prep_layer(n).gates) {
      if (g.arity() == 1) m.apply_one_site(g.qubits[0], g.matrix);
      else m.apply_two_site(g.qubits[0], g.matrix, CompressionPolicy::exact());
    }
  }
  return m;
}

StateMps schrodinger_evolve(const BrickworkCircuit& c, const CompressionPolicy& policy, EvolutionResult* info) {
  StateMps psi = initial_state_mps(c.initial, c.n_qubits);
  for (const auto& l : c.layers) {
    for (const auto& g0 : l.gates) {
      const Gate g = adjacent(g0);
      if (g.arity() == 1) psi.apply_one_site(g.qubits[0], g.matrix);
      else psi.apply_two_site(g.qubits[0], g.matrix, policy, info ? &info->log : nullptr);
    }
    if (info) info->max_entropy_per_layer.push_back(psi.max_entropy());
  }
  return psi;
}

double state_expectation(const StateMps& psi, const PauliString& p) {
  if (p.n_qubits() != psi.size()) throw SizeMismatch("pauli size differs from state");
  StateMps pp = psi;
  for (auto q : p.support()) pp.apply_one_site(q, gates::pauli(static_cast<int>(p.letter(q))));
  static const std::complex<double> powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return (powers[p.phase()] * psi.inner(pp)).real();
}

PtmMps heisenberg_evolve(const BrickworkCircuit& c, const PauliString& o, const CompressionPolicy& policy,
                         const NoiseModel* noise, EvolutionResult* info) {
  if (o.n_qubits() != c.n_qubits) throw SizeMismatch("observable size mismatch");
  PtmMps x = pauli_mps(o);
  TruncationLog* log = info ? &info->log : nullptr;
  for (std::size_t k = c.layers.size(); k-- > 0;) {
    const Layer& l = c.layers[k];
    for (const auto& g0 : l.gates) {
      const Gate g = adjacent(g0);
      if (g.arity() == 1) {
        x.apply_one_site(g.qubits[0], Mat(gate_ptm_1q(g.matrix).transpose()));
      } else {
        x.apply_two_site(g.qubits[0], Mat(gate_ptm_2q(g.matrix).transpose()), policy, log);
      }
    }
    if (noise) apply_diagonal(x, ptm_diagonal((*noise)[l.noise_slot]), policy, log);
    if (info) info->max_entropy_per_layer.push_back(x.max_entropy());
  }
  return x;
}

double heisenberg_expectation(const BrickworkCircuit& c, const PauliString& o, const CompressionPolicy& policy,
                              const NoiseModel* noise, EvolutionResult* info) {
  const PtmMps x = heisenberg_evolve(c, o, policy, noise, info);
  return x.dot(initial_state_ptm(c.initial, c.n_qubits));
}

PtmMps project_iz(const PtmMps& x) {
  PtmMps y = x;
  for (std::size_t q = 0; q < y.size(); ++q) {
    Tensor3<double> t = y.site(q);
    for (std::size_t l = 0; l < t.l; ++l)
      for (std::size_t r = 0; r < t.r; ++r) t(l, 1, r) = t(l, 2, r) = 0.0;
    y.set_site(q, std::move(t));
  }
  return y;
}

ConvergenceReport convergence_report(const std::vector<double>& chis, const std::vector<double>& values,
                                     const std::vector<double>& entropies, const std::vector<double>& projected_entropies,
                                     double chi_bar) {
  if (chis.size() != values.size()) throw SizeMismatch("chi and value series differ in length");
  if (chis.size() < 3) throw InvalidArgument("convergence report needs at least three bond dimensions");
  ConvergenceReport r;
  r.chis = chis;
  r.values = values;
  r.entropies = entropies;
  r.projected_entropies = projected_entropies;
  for (std::size_t i = 0; i < values.size(); ++i) r.successive_differences.push_back(i ? std::abs(values[i] - values[i - 1]) : 0.0);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < chis.size(); ++i) {
    if (chis[i] >= chi_bar) {
      xs.push_back(1.0 / chis[i]);
      ys.push_back(values[i]);
    }
  }
  if (xs.size() < 2) throw InvalidArgument("fewer than two points above chi_bar");
  Eigen::MatrixXd a(xs.size(), 2);
  Eigen::VectorXd y(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = xs[i];
    y(i) = ys[i];
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(y);
  r.extrapolated = coef(0);
  for (double v : values) r.delta_chi.push_back(std::abs(v - r.extrapolated));
  return r;
}

}  // namespace dutem::tn

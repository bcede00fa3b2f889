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

#include "dutem/pauli.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "dutem/error.hpp"

namespace dutem {

namespace {

std::size_t words_for(std::size_t n) { return (n + 63) / 64; }

void check_same_size(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw SizeMismatch("pauli strings on " + std::to_string(a.n_qubits()) + " and " +
                       std::to_string(b.n_qubits()) + " qubits");
  }
}

// i-exponent of sigma_a * sigma_b for non-identity letters.
int letter_product_phase(PauliLetter a, PauliLetter b) {
  if (a == b) return 0;
  const int ia = static_cast<int>(a), ib = static_cast<int>(b);
  // X->Y->Z->X is the cyclic (+i) direction.
  return ((ib - ia + 3) % 3 == 1) ? 1 : 3;
}

std::string phase_prefix(int k) {
  switch (k) {
    case 0: return "+";
    case 1: return "+i";
    case 2: return "-";
    default: return "-i";
  }
}

int parse_prefix(std::string_view& text) {
  int k = 0;
  if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
    k = text[0] == '-' ? 2 : 0;
    text.remove_prefix(1);
    if (!text.empty() && text[0] == 'i') {
      k += 1;
      text.remove_prefix(1);
    }
  }
  return k;
}

}  // namespace

char letter_char(PauliLetter p) { return "IXYZ"[static_cast<int>(p)]; }

PauliLetter letter_from_char(char c) {
  switch (c) {
    case 'I': case '_': return PauliLetter::I;
    case 'X': return PauliLetter::X;
    case 'Y': return PauliLetter::Y;
    case 'Z': return PauliLetter::Z;
    default: throw InvalidArgument(std::string("bad pauli letter '") + c + "'");
  }
}

PauliString::PauliString(std::size_t n) : n_(n), x_(words_for(n), 0), z_(words_for(n), 0) {}

PauliString PauliString::single(std::size_t n, std::size_t q, PauliLetter p) {
  PauliString s(n);
  s.set(q, p);
  return s;
}

PauliString PauliString::two(std::size_t n, std::size_t q0, PauliLetter p0, std::size_t q1, PauliLetter p1) {
  PauliString s(n);
  s.set(q0, p0);
  s.set(q1, p1);
  return s;
}

PauliString PauliString::from_text(std::string_view text) {
  const int k = parse_prefix(text);
  PauliString s(text.size());
  for (std::size_t q = 0; q < text.size(); ++q) s.set(q, letter_from_char(text[q]));
  s.set_phase(k);
  return s;
}

PauliString PauliString::from_sparse_text(std::size_t n, std::string_view text) {
  const int k = parse_prefix(text);
  const auto at = text.find('@');
  if (at == std::string_view::npos) throw InvalidArgument("sparse pauli text needs '@': " + std::string(text));
  std::string_view letters = text.substr(0, at);
  std::string_view sites = text.substr(at + 1);
  if (sites.size() < 2 || sites.front() != '(' || sites.back() != ')') {
    throw InvalidArgument("sparse pauli sites must be parenthesized: " + std::string(text));
  }
  sites = sites.substr(1, sites.size() - 2);
  std::vector<std::size_t> qs;
  std::stringstream ss{std::string(sites)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    qs.push_back(std::stoul(item));
  }
  if (qs.size() != letters.size()) throw InvalidArgument("letter/site count mismatch: " + std::string(text));
  PauliString s(n);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    if (qs[i] >= n) throw InvalidArgument("site out of range: " + std::string(text));
    s.set(qs[i], letter_from_char(letters[i]));
  }
  s.set_phase(k);
  return s;
}

PauliLetter PauliString::letter(std::size_t q) const {
  const bool x = (x_[q / 64] >> (q % 64)) & 1u;
  const bool z = (z_[q / 64] >> (q % 64)) & 1u;
  if (x && z) return PauliLetter::Y;
  if (x) return PauliLetter::X;
  if (z) return PauliLetter::Z;
  return PauliLetter::I;
}

void PauliString::set(std::size_t q, PauliLetter p) {
  if (q >= n_) throw InvalidArgument("qubit index out of range");
  const std::uint64_t bit = std::uint64_t{1} << (q % 64);
  const bool x = p == PauliLetter::X || p == PauliLetter::Y;
  const bool z = p == PauliLetter::Z || p == PauliLetter::Y;
  x_[q / 64] = x ? (x_[q / 64] | bit) : (x_[q / 64] & ~bit);
  z_[q / 64] = z ? (z_[q / 64] | bit) : (z_[q / 64] & ~bit);
}

int PauliString::sign() const {
  if (!is_hermitian()) throw InvalidArgument("non-Hermitian pauli string has no real sign");
  return phase_ == 0 ? 1 : -1;
}

PauliString PauliString::unsigned_copy() const {
  PauliString s = *this;
  s.phase_ = 0;
  return s;
}

std::size_t PauliString::weight() const {
  std::size_t w = 0;
  for (std::size_t i = 0; i < x_.size(); ++i) w += std::popcount(x_[i] | z_[i]);
  return w;
}

bool PauliString::is_identity() const {
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (x_[i] | z_[i]) return false;
  }
  return true;
}

std::vector<std::size_t> PauliString::support() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < x_.size(); ++w) {
    std::uint64_t m = x_[w] | z_[w];
    while (m) {
      out.push_back(w * 64 + std::countr_zero(m));
      m &= m - 1;
    }
  }
  return out;
}

std::string PauliString::to_text() const {
  std::string s = phase_prefix(phase_);
  for (std::size_t q = 0; q < n_; ++q) s += letter_char(letter(q));
  return s;
}

std::string PauliString::to_sparse_text() const {
  std::string letters, sites;
  for (auto q : support()) {
    letters += letter_char(letter(q));
    if (!sites.empty()) sites += ",";
    sites += std::to_string(q);
  }
  return phase_prefix(phase_) + letters + "@(" + sites + ")";
}

Eigen::MatrixXcd PauliString::dense() const {
  if (n_ > 14) throw SimulationCapExceeded("dense pauli matrix limited to 14 qubits");
  const std::size_t dim = std::size_t{1} << n_;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const std::uint64_t xm = n_ ? x_[0] : 0, zm = n_ ? z_[0] : 0;
  const int ny = std::popcount(xm & zm);
  static const cd powers[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
  for (std::size_t c = 0; c < dim; ++c) {
    const std::size_t r = c ^ xm;
    // Y|b> = i(-1)^b |b^1>, Z|b> = (-1)^b |b>
    const int minus = std::popcount(zm & c) % 2;
    m(r, c) = powers[(phase_ + ny + 2 * minus) % 4];
  }
  return m;
}

PauliString multiply(const PauliString& a, const PauliString& b) {
  check_same_size(a, b);
  PauliString r(a.n_);
  int k = a.phase_ + b.phase_;
  for (std::size_t w = 0; w < a.x_.size(); ++w) {
    std::uint64_t both = (a.x_[w] | a.z_[w]) & (b.x_[w] | b.z_[w]);
    while (both) {
      const std::size_t q = w * 64 + std::countr_zero(both);
      k += letter_product_phase(a.letter(q), b.letter(q));
      both &= both - 1;
    }
    r.x_[w] = a.x_[w] ^ b.x_[w];
    r.z_[w] = a.z_[w] ^ b.z_[w];
  }
  r.set_phase(k);
  return r;
}

bool anticommutes(const PauliString& a, const PauliString& b) {
  check_same_size(a, b);
  int parity = 0;
  const auto& ax = a.x_words();
  const auto& az = a.z_words();
  const auto& bx = b.x_words();
  const auto& bz = b.z_words();
  for (std::size_t w = 0; w < ax.size(); ++w) parity ^= std::popcount((ax[w] & bz[w]) ^ (az[w] & bx[w])) & 1;
  return parity != 0;
}

bool PauliLess::operator()(const PauliString& a, const PauliString& b) const {
  if (a.n_qubits() != b.n_qubits()) return a.n_qubits() < b.n_qubits();
  if (a.x_words() != b.x_words()) return a.x_words() < b.x_words();
  return a.z_words() < b.z_words();
}

bool same_up_to_phase(const PauliString& a, const PauliString& b) {
  return a.n_qubits() == b.n_qubits() && a.x_words() == b.x_words() && a.z_words() == b.z_words();
}

SparseBasis::SparseBasis(std::size_t n) : n_(n) {
  const PauliLetter letters[3] = {PauliLetter::X, PauliLetter::Y, PauliLetter::Z};
  for (std::size_t q = 0; q < n; ++q) {
    for (auto p : letters) entries_.push_back(PauliString::single(n, q, p));
  }
  for (std::size_t q = 0; q + 1 < n; ++q) {
    for (auto p0 : letters) {
      for (auto p1 : letters) entries_.push_back(PauliString::two(n, q, p0, q + 1, p1));
    }
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) index_.emplace(entries_[i], i);
}

std::optional<std::size_t> SparseBasis::index_of(const PauliString& p) const {
  auto it = index_.find(p);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

CliffordLayer CliffordLayer::identity(std::size_t n) {
  CliffordLayer c;
  c.n_ = n;
  for (std::size_t q = 0; q < n; ++q) {
    c.xs_.push_back(PauliString::single(n, q, PauliLetter::X));
    c.zs_.push_back(PauliString::single(n, q, PauliLetter::Z));
  }
  return c;
}

namespace {

// Expand a local operator in the Pauli basis; expects a single signed term.
PauliString decompose_local(std::size_t n, const std::vector<std::size_t>& qubits, const Eigen::MatrixXcd& m) {
  const std::size_t k = qubits.size();
  const std::size_t dim = std::size_t{1} << k;
  const std::size_t count = std::size_t{1} << (2 * k);
  for (std::size_t idx = 0; idx < count; ++idx) {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Ones(1, 1);
    std::vector<int> letters(k);
    for (std::size_t j = 0; j < k; ++j) {
      letters[j] = static_cast<int>((idx >> (2 * (k - 1 - j))) & 3u);
      Eigen::Matrix2cd s = gates::pauli(letters[j]);
      Eigen::MatrixXcd next(p.rows() * 2, p.cols() * 2);
      for (int r = 0; r < p.rows(); ++r)
        for (int c = 0; c < p.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = p(r, c) * s;
      p = next;
    }
    const cd coeff = (p.adjoint() * m).trace() / static_cast<double>(dim);
    if (std::abs(coeff) < 1e-9) continue;
    if (std::abs(std::abs(coeff) - 1.0) > 1e-9) break;
    PauliString out(n);
    for (std::size_t j = 0; j < k; ++j) out.set(qubits[j], static_cast<PauliLetter>(letters[j]));
    if (std::abs(coeff.imag()) > 1e-9) break;
    out.set_phase(coeff.real() > 0 ? 0 : 2);
    return out;
  }
  throw NotClifford("gate does not map paulis to signed paulis");
}

}  // namespace

CliffordLayer CliffordLayer::from_gates(std::size_t n, const std::vector<Gate>& gate_list) {
  CliffordLayer c = identity(n);
  std::vector<bool> used(n, false);
  for (const auto& g0 : gate_list) {
    const Gate g = g0.sorted();
    for (auto q : g.qubits) {
      if (q >= n) throw InvalidArgument("gate qubit out of range");
      if (used[q]) throw InvalidArgument("overlapping gates in one layer");
      used[q] = true;
    }
    const std::size_t k = g.qubits.size();
    for (std::size_t j = 0; j < k; ++j) {
      for (int letter : {1, 3}) {
        Eigen::MatrixXcd local = Eigen::MatrixXcd::Ones(1, 1);
        for (std::size_t i = 0; i < k; ++i) {
          Eigen::Matrix2cd s = gates::pauli(i == j ? letter : 0);
          Eigen::MatrixXcd next(local.rows() * 2, local.cols() * 2);
          for (int r = 0; r < local.rows(); ++r)
            for (int cc = 0; cc < local.cols(); ++cc) next.block(2 * r, 2 * cc, 2, 2) = local(r, cc) * s;
          local = next;
        }
        Eigen::MatrixXcd img = g.matrix * local * g.matrix.adjoint();
        PauliString p = decompose_local(n, g.qubits, img);
        (letter == 1 ? c.xs_ : c.zs_)[g.qubits[j]] = p;
      }
    }
  }
  return c;
}

CliffordLayer CliffordLayer::hadamard(std::size_t n, std::size_t q) {
  return from_gates(n, {gates::single(q, gates::hadamard())});
}

CliffordLayer CliffordLayer::phase(std::size_t n, std::size_t q) {
  return from_gates(n, {gates::single(q, gates::phase_s())});
}

CliffordLayer CliffordLayer::cz(std::size_t n, std::size_t a, std::size_t b) {
  return from_gates(n, {gates::pair(a, b, gates::cz())});
}

CliffordLayer CliffordLayer::cnot(std::size_t n, std::size_t control, std::size_t target) {
  return from_gates(n, {gates::pair(control, target, gates::cnot())});
}

PauliString CliffordLayer::conjugate(const PauliString& p) const {
  if (p.n_qubits() != n_) throw SizeMismatch("pauli size does not match clifford layer");
  PauliString out(n_);
  int k = p.phase();
  for (auto q : p.support()) {
    const PauliLetter l = p.letter(q);
    // Y = i X Z
    if (l == PauliLetter::Y) k += 1;
    if (l == PauliLetter::X || l == PauliLetter::Y) out = multiply(out, xs_[q]);
    if (l == PauliLetter::Z || l == PauliLetter::Y) out = multiply(out, zs_[q]);
  }
  out.set_phase(out.phase() + k);
  return out;
}

CliffordLayer CliffordLayer::then(const CliffordLayer& next) const {
  if (next.n_ != n_) throw SizeMismatch("clifford layers of different size");
  CliffordLayer c;
  c.n_ = n_;
  for (std::size_t q = 0; q < n_; ++q) {
    c.xs_.push_back(next.conjugate(xs_[q]));
    c.zs_.push_back(next.conjugate(zs_[q]));
  }
  return c;
}

bool CliffordLayer::is_symplectic() const {
  for (std::size_t i = 0; i < n_; ++i) {
    if (!xs_[i].is_hermitian() || !zs_[i].is_hermitian()) return false;
    for (std::size_t j = 0; j < n_; ++j) {
      if (anticommutes(xs_[i], xs_[j]) || anticommutes(zs_[i], zs_[j])) return false;
      if (anticommutes(xs_[i], zs_[j]) != (i == j)) return false;
    }
  }
  return true;
}

std::pair<BinaryMatrix, BinaryMatrix> build_anticommutation_matrices(const SparseBasis& basis,
                                                                    const CliffordLayer& layer) {
  if (basis.n_qubits() != layer.n_qubits()) throw SizeMismatch("basis and layer sizes differ");
  const auto m = static_cast<Eigen::Index>(basis.size());
  BinaryMatrix a(m, m), ap(m, m);
  std::vector<PauliString> conj;
  conj.reserve(basis.size());
  for (const auto& p : basis.entries()) conj.push_back(layer.conjugate(p));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      a(i, j) = anticommutes(basis[i], basis[j]) ? 1 : 0;
      ap(i, j) = anticommutes(conj[i], basis[j]) ? 1 : 0;
    }
  }
  return {a, ap};
}

}  // namespace dutem

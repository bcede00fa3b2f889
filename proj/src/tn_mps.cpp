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

double TruncationLog::total_discarded() const {
  double s = 0;
  for (const auto& r : records) s += r.discarded;
  return s;
}

double TruncationLog::max_discarded() const {
  double s = 0;
  for (const auto& r : records) s = std::max(s, r.discarded);
  return s;
}

std::size_t TruncationLog::max_kept() const {
  std::size_t k = 0;
  for (const auto& r : records) k = std::max(k, r.after);
  return k;
}

namespace {

// Singular values below this fraction of the largest are treated as zero.
constexpr double kNumericalZero = 1e-14;

std::size_t choose_rank(const Eigen::VectorXd& s, const CompressionPolicy& policy, double* discarded) {
  const auto m = static_cast<std::size_t>(s.size());
  double total = s.squaredNorm();
  if (m == 0 || total == 0.0) {
    *discarded = 0.0;
    return 1;
  }
  std::size_t r = 0;
  while (r < m && s(r) > kNumericalZero * s(0)) ++r;
  r = std::max<std::size_t>(r, 1);
  std::size_t k = r;
  if (policy.kind == CompressionPolicy::Kind::cutoff && policy.cutoff > 0) {
    // tail[k] = sum_{j >= k} s_j^2
    double tail = 0;
    std::vector<double> tails(m + 1, 0.0);
    for (std::size_t j = m; j-- > 0;) {
      tail += s(j) * s(j);
      tails[j] = tail;
    }
    for (std::size_t c = 1; c <= r; ++c) {
      if (tails[c] / total < policy.cutoff) {
        k = c;
        break;
      }
    }
  }
  k = std::min(k, policy.max_bond);
  k = std::max<std::size_t>(k, 1);
  double d = 0;
  for (std::size_t j = k; j < m; ++j) d += s(j) * s(j);
  *discarded = d / total;
  return k;
}

template <class T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using RowMap = Eigen::Map<RowMat<T>>;
template <class T>
using ConstRowMap = Eigen::Map<const RowMat<T>>;

template <class T>
RowMap<T> left_grouped(Tensor3<T>& t) {
  return RowMap<T>(t.data.data(), t.l * t.d, t.r);
}
template <class T>
ConstRowMap<T> left_grouped(const Tensor3<T>& t) {
  return ConstRowMap<T>(t.data.data(), t.l * t.d, t.r);
}
template <class T>
RowMap<T> right_grouped(Tensor3<T>& t) {
  return RowMap<T>(t.data.data(), t.l, t.d * t.r);
}
template <class T>
ConstRowMap<T> right_grouped(const Tensor3<T>& t) {
  return ConstRowMap<T>(t.data.data(), t.l, t.d * t.r);
}

template <class T>
Tensor3<T> from_matrix(const RowMat<T>& m, std::size_t l, std::size_t d, std::size_t r) {
  Tensor3<T> t(l, d, r);
  std::copy(m.data(), m.data() + m.size(), t.data.begin());
  return t;
}

template <class T>
struct TruncatedSvd {
  RowMat<T> u;
  Eigen::VectorXd s;
  RowMat<T> vh;
};

template <class T>
TruncatedSvd<T> truncated_svd(const RowMat<T>& m, const CompressionPolicy& policy, TruncationRecord* rec) {
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::BDCSVD<Mat> svd(Mat(m), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  double discarded = 0;
  const std::size_t k = choose_rank(s, policy, &discarded);
  TruncatedSvd<T> out;
  out.s = s.head(static_cast<Eigen::Index>(std::min<std::size_t>(k, s.size())));
  const auto kk = out.s.size();
  out.u = svd.matrixU().leftCols(kk);
  out.vh = svd.matrixV().leftCols(kk).adjoint();
  if (kk == 0) {
    // all-zero input: keep a single zero mode so shapes stay valid
    out.s = Eigen::VectorXd::Zero(1);
    out.u = RowMat<T>::Zero(m.rows(), 1);
    out.vh = RowMat<T>::Zero(1, m.cols());
  }
  if (rec) {
    rec->before = static_cast<std::size_t>(s.size());
    rec->after = static_cast<std::size_t>(out.s.size());
    rec->discarded = discarded;
  }
  return out;
}

}  // namespace

template <class T>
Mps<T>::Mps(std::size_t n, std::size_t d) : d_(d), sites_(n, Tensor3<T>(1, d, 1)), center_(-1) {}

template <class T>
Mps<T> Mps<T>::product(const std::vector<std::vector<T>>& local) {
  if (local.empty()) throw InvalidArgument("empty product state");
  Mps m(local.size(), local[0].size());
  for (std::size_t q = 0; q < local.size(); ++q) {
    if (local[q].size() != m.d_) throw SizeMismatch("product-state site dimensions differ");
    for (std::size_t p = 0; p < m.d_; ++p) m.sites_[q](0, p, 0) = local[q][p];
  }
  return m;
}

template <class T>
std::size_t Mps<T>::bond(std::size_t b) const {
  if (b == 0) return sites_.empty() ? 1 : sites_.front().l;
  return sites_.at(b - 1).r;
}

template <class T>
std::size_t Mps<T>::max_bond() const {
  std::size_t m = 1;
  for (const auto& s : sites_) m = std::max(m, s.r);
  return m;
}

template <class T>
void Mps<T>::set_site(std::size_t q, Tensor3<T> t) {
  if (t.d != d_) throw SizeMismatch("site physical dimension mismatch");
  sites_.at(q) = std::move(t);
  center_ = -1;
}

template <class T>
void Mps<T>::left_step(std::size_t q) {
  Tensor3<T>& a = sites_[q];
  const Eigen::Index rows = static_cast<Eigen::Index>(a.l * a.d), cols = static_cast<Eigen::Index>(a.r);
  Matrix m = left_grouped(a);
  Eigen::HouseholderQR<Matrix> qr(m);
  const Eigen::Index k = std::min(rows, cols);
  RowMat<T> qm = qr.householderQ() * Matrix::Identity(rows, k);
  Matrix r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  Tensor3<T>& b = sites_[q + 1];
  RowMat<T> nb = r * right_grouped(b);
  const std::size_t br = b.r;
  a = from_matrix<T>(qm, a.l, a.d, static_cast<std::size_t>(k));
  b = from_matrix<T>(nb, static_cast<std::size_t>(k), d_, br);
}

template <class T>
void Mps<T>::right_step(std::size_t q) {
  Tensor3<T>& b = sites_[q];
  const Eigen::Index rows = static_cast<Eigen::Index>(b.l), cols = static_cast<Eigen::Index>(b.d * b.r);
  Matrix mt = right_grouped(b).adjoint();
  Eigen::HouseholderQR<Matrix> qr(mt);
  const Eigen::Index k = std::min(rows, cols);
  Matrix qm = qr.householderQ() * Matrix::Identity(cols, k);
  Matrix r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  Tensor3<T>& a = sites_[q - 1];
  RowMat<T> na = left_grouped(a) * r.adjoint();
  RowMat<T> nbm = qm.adjoint();
  const std::size_t br = b.r, al = a.l;
  b = from_matrix<T>(nbm, static_cast<std::size_t>(k), d_, br);
  a = from_matrix<T>(na, al, d_, static_cast<std::size_t>(k));
}

template <class T>
void Mps<T>::canonicalize(std::size_t q) {
  const std::size_t n = sites_.size();
  if (q >= n) throw InvalidArgument("canonical center out of range");
  if (center_ < 0) {
    for (std::size_t k = 0; k < q; ++k) left_step(k);
    for (std::size_t k = n - 1; k > q; --k) right_step(k);
  } else {
    auto c = static_cast<std::size_t>(center_);
    while (c < q) left_step(c++);
    while (c > q) right_step(c--);
  }
  center_ = static_cast<int>(q);
}

template <class T>
bool Mps<T>::is_canonical(double tol) const {
  if (center_ < 0) return false;
  const auto c = static_cast<std::size_t>(center_);
  for (std::size_t q = 0; q < sites_.size(); ++q) {
    if (q == c) continue;
    Matrix g;
    if (q < c) {
      Matrix a = left_grouped(sites_[q]);
      g = a.adjoint() * a;
    } else {
      Matrix b = right_grouped(sites_[q]);
      g = b * b.adjoint();
    }
    if ((g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

template <class T>
void Mps<T>::apply_one_site(std::size_t q, const Matrix& op) {
  if (op.rows() != static_cast<Eigen::Index>(d_) || op.cols() != static_cast<Eigen::Index>(d_)) {
    throw SizeMismatch("one-site operator dimension mismatch");
  }
  if (center_ >= 0) canonicalize(q);
  Tensor3<T>& t = sites_[q];
  Tensor3<T> out(t.l, t.d, t.r);
  for (std::size_t a = 0; a < t.l; ++a) {
    Eigen::Map<const RowMat<T>> in(t.data.data() + a * t.d * t.r, t.d, t.r);
    Eigen::Map<RowMat<T>> o(out.data.data() + a * t.d * t.r, t.d, t.r);
    o = op * in;
  }
  t = std::move(out);
}

template <class T>
void Mps<T>::apply_two_site(std::size_t q, const Matrix& op, const CompressionPolicy& policy, TruncationLog* log) {
  if (q + 1 >= sites_.size()) throw InvalidArgument("two-site operator out of range");
  const std::size_t dd = d_ * d_;
  if (op.rows() != static_cast<Eigen::Index>(dd) || op.cols() != static_cast<Eigen::Index>(dd)) {
    throw SizeMismatch("two-site operator dimension mismatch");
  }
  canonicalize(q);
  const Tensor3<T>& a = sites_[q];
  const Tensor3<T>& b = sites_[q + 1];
  const std::size_t l = a.l, r = b.r;
  // theta as [l][p1][p2][r], which is row-major (l*d) x (d*r) and also l blocks of (d*d) x r
  RowMat<T> theta = left_grouped(a) * right_grouped(b);
  for (std::size_t k = 0; k < l; ++k) {
    Eigen::Map<RowMat<T>> blk(theta.data() + k * dd * r, dd, r);
    RowMat<T> tmp = op * blk;
    blk = tmp;
  }
  TruncationRecord rec;
  rec.bond = q + 1;
  auto svd = truncated_svd<T>(theta, policy, &rec);
  const auto k = static_cast<std::size_t>(svd.s.size());
  RowMat<T> right = svd.s.template cast<T>().asDiagonal() * svd.vh;
  sites_[q] = from_matrix<T>(svd.u, l, d_, k);
  sites_[q + 1] = from_matrix<T>(right, k, d_, r);
  center_ = static_cast<int>(q + 1);
  if (log) log->records.push_back(rec);
}

template <class T>
TruncationLog Mps<T>::compress(const CompressionPolicy& policy) {
  TruncationLog log;
  const std::size_t n = sites_.size();
  if (n == 0) return log;
  canonicalize(n - 1);
  for (std::size_t q = n - 1; q > 0; --q) {
    Tensor3<T>& b = sites_[q];
    RowMat<T> m = right_grouped(b);
    TruncationRecord rec;
    rec.bond = q;
    auto svd = truncated_svd<T>(m, policy, &rec);
    const auto k = static_cast<std::size_t>(svd.s.size());
    const std::size_t br = b.r;
    b = from_matrix<T>(svd.vh, k, d_, br);
    Tensor3<T>& a = sites_[q - 1];
    RowMat<T> us = svd.u * svd.s.template cast<T>().asDiagonal();
    RowMat<T> na = left_grouped(a) * us;
    const std::size_t al = a.l;
    a = from_matrix<T>(na, al, d_, k);
    log.records.push_back(rec);
  }
  center_ = 0;
  return log;
}

namespace {

template <class T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> slice(const Tensor3<T>& t, std::size_t p) {
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> m(t.l, t.r);
  for (std::size_t a = 0; a < t.l; ++a)
    for (std::size_t c = 0; c < t.r; ++c) m(a, c) = t(a, p, c);
  return m;
}

template <class T>
T contract(const Mps<T>& x, const Mps<T>& y, bool conj_x) {
  if (x.size() != y.size() || x.phys_dim() != y.phys_dim()) throw SizeMismatch("mps shapes differ");
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  Mat env = Mat::Ones(1, 1);
  for (std::size_t q = 0; q < x.size(); ++q) {
    const auto& a = x.site(q);
    const auto& b = y.site(q);
    Mat next = Mat::Zero(a.r, b.r);
    for (std::size_t p = 0; p < x.phys_dim(); ++p) {
      Mat sa = slice(a, p);
      if (conj_x) sa = sa.conjugate();
      next.noalias() += sa.transpose() * env * slice(b, p);
    }
    env = std::move(next);
  }
  return env(0, 0);
}

}  // namespace

template <class T>
T Mps<T>::dot(const Mps& other) const {
  return contract(*this, other, false);
}

template <class T>
T Mps<T>::inner(const Mps& other) const {
  return contract(*this, other, true);
}

template <class T>
double Mps<T>::norm() const {
  return std::sqrt(std::abs(inner(*this)));
}

template <class T>
void Mps<T>::scale(T s) {
  if (sites_.empty()) return;
  auto& t = sites_[center_ >= 0 ? static_cast<std::size_t>(center_) : 0];
  for (auto& v : t.data) v *= s;
}

template <class T>
T Mps<T>::component(const std::vector<std::size_t>& phys) const {
  if (phys.size() != sites_.size()) throw SizeMismatch("component index length");
  Eigen::Matrix<T, 1, Eigen::Dynamic> v = Eigen::Matrix<T, 1, Eigen::Dynamic>::Ones(1);
  for (std::size_t q = 0; q < sites_.size(); ++q) v = v * slice(sites_[q], phys[q]);
  return v(0);
}

template <class T>
std::vector<std::vector<double>> Mps<T>::schmidt_spectra() const {
  Mps c = *this;
  const std::size_t n = c.size();
  std::vector<std::vector<double>> out;
  if (n < 2) return out;
  c.canonicalize(0);
  for (std::size_t q = 0; q + 1 < n; ++q) {
    RowMat<T> m = left_grouped(c.sites_[q]);
    auto svd = truncated_svd<T>(m, CompressionPolicy::exact(), nullptr);
    const auto k = static_cast<std::size_t>(svd.s.size());
    std::vector<double> s(svd.s.data(), svd.s.data() + k);
    out.push_back(s);
    const std::size_t al = c.sites_[q].l;
    c.sites_[q] = from_matrix<T>(svd.u, al, c.d_, k);
    RowMat<T> sv = svd.s.template cast<T>().asDiagonal() * svd.vh;
    RowMat<T> nb = sv * right_grouped(c.sites_[q + 1]);
    const std::size_t br = c.sites_[q + 1].r;
    c.sites_[q + 1] = from_matrix<T>(nb, k, c.d_, br);
  }
  return out;
}

template <class T>
std::vector<double> Mps<T>::bond_entropies() const {
  std::vector<double> out;
  for (const auto& s : schmidt_spectra()) {
    double total = 0;
    for (double v : s) total += v * v;
    double e = 0;
    if (total > 0) {
      for (double v : s) {
        const double p = v * v / total;
        if (p > 0) e -= p * std::log2(p);
      }
    }
    out.push_back(e);
  }
  return out;
}

template <class T>
double Mps<T>::max_entropy() const {
  double m = 0;
  for (double e : bond_entropies()) m = std::max(m, e);
  return m;
}

template <class T>
typename Mps<T>::Vector Mps<T>::to_dense() const {
  double total = 1;
  for (std::size_t q = 0; q < sites_.size(); ++q) total *= static_cast<double>(d_);
  if (total > double(1 << 24)) throw SimulationCapExceeded("dense conversion too large");
  RowMat<T> first = right_grouped(sites_[0]);  // 1 x (d r)
  std::size_t rows = d_;
  RowMat<T> cur = RowMap<T>(first.data(), rows, sites_[0].r);
  for (std::size_t q = 1; q < sites_.size(); ++q) {
    RowMat<T> next = cur * right_grouped(sites_[q]);
    rows *= d_;
    RowMat<T> reshaped = RowMap<T>(next.data(), rows, sites_[q].r);
    cur = std::move(reshaped);
  }
  return Eigen::Map<Vector>(cur.data(), cur.size());
}

template class Mps<double>;
template class Mps<std::complex<double>>;

}  // namespace dutem::tn

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

#include "dutem/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dutem/error.hpp"

namespace dutem {

namespace {

// Unconstrained least squares restricted to the passive columns.
Eigen::VectorXd solve_passive(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const std::vector<bool>& passive) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    if (passive[j]) cols.push_back(j);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(a.cols());
  if (cols.empty()) return z;
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) sub.col(k) = a.col(cols[k]);
  const Eigen::VectorXd s = sub.colPivHouseholderQr().solve(b);
  for (std::size_t k = 0; k < cols.size(); ++k) z(cols[k]) = s(k);
  return z;
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, std::size_t max_iter, double tol) {
  if (a.rows() != b.size()) throw SizeMismatch("nnls: row count differs from right-hand side");
  const Eigen::Index n = a.cols();
  if (max_iter == 0) max_iter = 3 * static_cast<std::size_t>(std::max<Eigen::Index>(n, 1));
  if (tol <= 0) {
    tol = 10 * std::numeric_limits<double>::epsilon() * std::max<double>(1.0, a.cwiseAbs().maxCoeff()) *
          static_cast<double>(std::max(a.rows(), n));
  }
  NnlsResult res;
  res.x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  Eigen::VectorXd w = a.transpose() * (b - a * res.x);
  while (res.iterations < max_iter) {
    Eigen::Index best = -1;
    double wmax = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && w(j) > wmax) {
        wmax = w(j);
        best = j;
      }
    }
    if (best < 0) {
      res.converged = true;
      break;
    }
    passive[best] = true;
    ++res.iterations;
    while (true) {
      Eigen::VectorXd z = solve_passive(a, b, passive);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && z(j) <= 0) feasible = false;
      if (feasible) {
        res.x = z;
        break;
      }
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && z(j) <= 0) alpha = std::min(alpha, res.x(j) / (res.x(j) - z(j)));
      }
      res.x += alpha * (z - res.x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && std::abs(res.x(j)) <= tol) {
          passive[j] = false;
          res.x(j) = 0;
        }
      }
    }
    w = a.transpose() * (b - a * res.x);
  }
  res.residual = (a * res.x - b).norm();
  return res;
}

}  // namespace dutem

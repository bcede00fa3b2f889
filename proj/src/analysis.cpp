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

#include "dutem/analysis.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <Eigen/Dense>

#include "dutem/error.hpp"

namespace dutem {

RateFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& c, const std::vector<double>& sigma) {
  if (t.size() != c.size()) throw SizeMismatch("times and values differ in length");
  if (!sigma.empty() && sigma.size() != c.size()) throw SizeMismatch("sigma length mismatch");
  RateFit fit;
  fit.dropped.assign(c.size(), false);
  bool known = !sigma.empty();
  Eigen::Matrix2d ata = Eigen::Matrix2d::Zero();
  Eigen::Vector2d aty = Eigen::Vector2d::Zero();
  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i] > 0) || (known && !(sigma[i] > 0))) {
      fit.dropped[i] = true;
      fit.flagged = true;
      continue;
    }
    used.push_back(i);
  }
  if (used.size() < 3) throw InvalidArgument("decay-rate fit needs at least 3 positive points");
  for (std::size_t i : used) {
    const double w = known ? std::pow(c[i] / sigma[i], 2) : 1.0;
    const Eigen::Vector2d row(1.0, t[i]);
    ata += w * row * row.transpose();
    aty += w * std::log(c[i]) * row;
  }
  const Eigen::Vector2d sol = ata.ldlt().solve(aty);
  const Eigen::Matrix2d cov = ata.inverse();
  fit.amplitude = std::exp(sol(0));
  fit.rate = -sol(1);
  double quantile;
  if (known) {
    fit.stderr_ = std::sqrt(cov(1, 1));
    quantile = boost::math::quantile(boost::math::normal(), 0.975);
  } else {
    double rss = 0;
    for (std::size_t i : used) {
      const double r = std::log(c[i]) - sol(0) - sol(1) * t[i];
      rss += r * r;
    }
    const double dof = static_cast<double>(used.size() - 2);
    fit.stderr_ = std::sqrt(rss / dof * cov(1, 1));
    quantile = boost::math::quantile(boost::math::students_t(dof), 0.975);
  }
  fit.ci_low = fit.rate - quantile * fit.stderr_;
  fit.ci_high = fit.rate + quantile * fit.stderr_;
  return fit;
}

double theory_decay_rate(double h) { return -std::log(std::cos(2 * h)); }

OverheadRatios sampling_overheads(double r) {
  if (!(r >= 1.0)) throw InvalidArgument("signal damping R must be at least 1");
  const double zne = 1.0 + 3.59 * std::log(r);
  return {r * r, zne * zne};
}

double damping_ratio(double ideal, double noisy) {
  if (noisy == 0) throw InvalidArgument("noisy signal is zero");
  return std::abs(ideal / noisy);
}

RelativeErrors relative_error_report(const std::vector<double>& experimental, const std::vector<double>& mitigated,
                                     const std::vector<double>& noisy_sim, const std::vector<double>& exact) {
  const std::size_t n = experimental.size();
  if (mitigated.size() != n || noisy_sim.size() != n || exact.size() != n) {
    throw SizeMismatch("relative-error series differ in length");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto rel = [&](double v, double ref) { return ref == 0 ? nan : std::abs(v - ref) / std::abs(ref); };
  RelativeErrors out;
  for (std::size_t i = 0; i < n; ++i) {
    out.r_u.push_back(rel(experimental[i], noisy_sim[i]));
    out.r_m.push_back(rel(mitigated[i], exact[i]));
  }
  return out;
}

void CsvTable::add(std::vector<double> row) {
  if (row.size() != header.size()) throw SizeMismatch("CSV row width differs from header");
  rows.push_back(std::move(row));
}

void write_csv(std::ostream& os, const CsvTable& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << table.header[i];
  os << '\n' << std::setprecision(17);
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  write_csv(f, table);
}

CsvTable decay_curve_table() {
  return {{"t", "exact", "noisy_simulation", "unmitigated", "unmitigated_stderr", "mitigated", "mitigated_stderr"}, {}};
}

CsvTable overhead_table(const std::vector<double>& ratios) {
  CsvTable t{{"R", "pec_over_tem", "zne_over_tem"}, {}};
  for (double r : ratios) {
    const auto o = sampling_overheads(r);
    t.add({r, o.pec_over_tem, o.zne_over_tem});
  }
  return t;
}

CsvTable convergence_table() {
  return {{"chi", "value", "successive_difference", "delta_chi", "entropy", "projected_entropy"}, {}};
}

}  // namespace dutem

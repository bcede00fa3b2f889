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

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace dutem {

struct RateFit {
  double rate = 0;  // C(t) ~ A exp(-rate t)
  double stderr_ = 0;
  double ci_low = 0;  // 95% confidence interval
  double ci_high = 0;
  double amplitude = 1;
  std::vector<bool> dropped;  // non-positive values
  bool flagged = false;
};

// Least squares on log C. With stated errors the fit is weighted and the
// interval uses the normal quantile; otherwise Student t on the residuals.
RateFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& c,
                       const std::vector<double>& sigma = {});

// Decay rate of the dual-unitary light-cone correlator.
double theory_decay_rate(double h);

struct OverheadRatios {
  double pec_over_tem = 1;
  double zne_over_tem = 1;
};

// R is the ideal / noisy signal ratio; R < 1 is rejected.
OverheadRatios sampling_overheads(double r);
double damping_ratio(double ideal, double noisy);

struct RelativeErrors {
  // |value - reference| / |reference|; NaN where the reference is zero.
  std::vector<double> r_u;  // unmitigated against noisy simulation
  std::vector<double> r_m;  // mitigated against exact
};

RelativeErrors relative_error_report(const std::vector<double>& experimental, const std::vector<double>& mitigated,
                                     const std::vector<double>& noisy_sim, const std::vector<double>& exact);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  void add(std::vector<double> row);
};

void write_csv(std::ostream& os, const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);

// Header t,exact,noisy_simulation,unmitigated,unmitigated_stderr,mitigated,mitigated_stderr.
CsvTable decay_curve_table();
// Header R,pec_over_tem,zne_over_tem.
CsvTable overhead_table(const std::vector<double>& ratios);
// Header chi,value,successive_difference,delta_chi,entropy,projected_entropy.
CsvTable convergence_table();

}  // namespace dutem

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

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dutem/error.hpp"
#include "dutem/exact_sim.hpp"
#include "dutem/measurement.hpp"
#include "dutem/noise.hpp"
#include "dutem/tn.hpp"

using namespace dutem;

namespace {

NoiseModel random_model(std::size_t n, std::uint64_t seed, double scale) {
  const SparseBasis b(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, scale);
  std::vector<double> re, ro;
  for (std::size_t i = 0; i < b.size(); ++i) {
    re.push_back(u(rng));
    ro.push_back(u(rng));
  }
  return {PauliLindbladChannel::sparse(b, re, Parity::even), PauliLindbladChannel::sparse(b, ro, Parity::odd)};
}

constexpr Basis kBases[] = {Basis::X, Basis::Y, Basis::Z};

}  // namespace

TEST_SUITE("measurement") {
  TEST_CASE("POVM effects are complete and the duals reconstruct any state") {
    const BasisDistribution d{0.6, 0.25, 0.15};
    Eigen::Matrix2cd sum = Eigen::Matrix2cd::Zero();
    for (auto b : kBases)
      for (int bit : {0, 1}) sum += povm_effect(d, b, bit);
    CHECK((sum - Eigen::Matrix2cd::Identity()).norm() < 1e-15);

    Eigen::Matrix2cd sigma;
    sigma << std::complex<double>(0.7, 0), std::complex<double>(0.1, -0.2), std::complex<double>(0.1, 0.2),
        std::complex<double>(0.3, 0);
    Eigen::Matrix2cd rec = Eigen::Matrix2cd::Zero();
    for (auto b : kBases)
      for (int bit : {0, 1}) rec += (povm_effect(d, b, bit) * sigma).trace() * dual_operator(d, b, bit);
    CHECK((rec - sigma).norm() < 1e-14);
  }

  TEST_CASE("dual table rows are Pauli components of the dual operators") {
    const BasisDistribution d{0.8, 0.1, 0.1};
    const auto t = dual_table(d);
    for (auto b : kBases) {
      for (int bit : {0, 1}) {
        const int m = 2 * (static_cast<int>(b) - 1) + bit;
        for (int a = 0; a < 4; ++a) {
          const double ref = (dual_operator(d, b, bit) * gates::pauli(a)).trace().real();
          CHECK(std::abs(t(m, a) - ref) < 1e-13);
        }
      }
    }
    const auto tc = dual_table(d, 0.5);
    CHECK(std::abs(tc(0, 1) - 2.0 / 0.8) < 1e-13);
    CHECK(tc(0, 0) == 1.0);
    CHECK_THROWS_AS(dual_table(d, 0.0), InvalidArgument);
    CHECK_THROWS_AS((BasisDistribution{0.5, 0.5, 0.0}.validate()), InvalidArgument);
    CHECK_THROWS_AS((BasisDistribution{0.5, 0.4, 0.2}.validate()), InvalidArgument);
  }

  TEST_CASE("signal-biased distributions and setting sampling") {
    const auto dists = signal_biased_distributions(5, 2);
    CHECK(dists[2].px == 0.8);
    CHECK(std::abs(dists[0].px - 1.0 / 3) < 1e-15);
    std::mt19937_64 rng(1);
    const auto s = sample_settings(dists, 20000, rng);
    double nx = 0;
    for (const auto& m : s) nx += m.bases[2] == Basis::X;
    const double sigma = std::sqrt(0.8 * 0.2 / 20000);
    CHECK(std::abs(nx / 20000 - 0.8) < 5 * sigma);
  }

  TEST_CASE("grouped standard error by hand") {
    const std::vector<std::uint32_t> ids{0, 0, 1, 1, 1, 2};
    const std::vector<double> xi{1, 3, -2, 0, 5, 4};
    const auto e = grouped_estimate(ids, xi);
    const double mean = 11.0 / 6;
    const double within = (1 + 1) + (9 + 1 + 16) + 0;
    const double between = (2 - mean) * (2 - mean) + (1 - mean) * (1 - mean) + (4 - mean) * (4 - mean);
    CHECK(std::abs(e.value - mean) < 1e-14);
    CHECK(std::abs(e.stderr_ - std::sqrt(within / 36 + between / 9)) < 1e-14);
    CHECK_THROWS_AS(grouped_estimate({}, {}), InvalidArgument);
  }

  TEST_CASE("shot estimator is unbiased against the density matrix") {
    const std::size_t n = 5;
    const auto c = build_brickwork({std::numbers::pi / 4, std::numbers::pi / 4, 0.2, n, 2});
    const NoiseModel noise = random_model(n, 21, 0.03);
    const auto dists = signal_biased_distributions(n, 2);
    std::mt19937_64 rng(8);
    const auto settings = sample_settings(dists, 256, rng);
    const ReadoutNoise ro = ReadoutNoise::uniform(n, 0.02);
    const auto records = generate_shots(c, noise, ro, settings, {.shots_per_setting = 64, .seed = 4});
    CHECK(records.size() == 256 * 64);
    std::vector<double> cal(n);
    for (std::size_t q = 0; q < n; ++q) cal[q] = ro.calibration(q);
    for (const auto* s : {"IIXII", "IZZII", "IIYXI"}) {
      const auto o = PauliString::from_text(s);
      const double ref = noisy_expectation_dm(c, noise, o);
      const auto e = estimate_pauli(records, o, dists, cal);
      CHECK(e.stderr_ > 0);
      CHECK(std::abs(e.value - ref) < 4 * e.stderr_);
    }
  }

  TEST_CASE("trajectory backend agrees with the density backend") {
    const std::size_t n = 5;
    const auto c = build_brickwork({std::numbers::pi / 4, std::numbers::pi / 4, 0.1, n, 1});
    const NoiseModel noise = random_model(n, 22, 0.03);
    const auto dists = signal_biased_distributions(n, 1);
    std::mt19937_64 rng(9);
    const auto settings = sample_settings(dists, 128, rng);
    const auto o = PauliString::single(n, 1, PauliLetter::X);
    const auto recs = generate_shots(c, noise, ReadoutNoise::none(n), settings,
                                     {.shots_per_setting = 64, .backend = ShotBackend::trajectory, .seed = 5});
    const auto e = estimate_pauli(recs, o, dists);
    CHECK(std::abs(e.value - noisy_expectation_dm(c, noise, o)) < 4 * e.stderr_);
  }

  TEST_CASE("TREX calibration and mitigation") {
    const ReadoutNoise ro{{0.01, 0.03}, {0.02, 0.05}};
    std::mt19937_64 rng(2);
    const auto cal = calibrate_trex(ro, 100000, rng);
    for (std::size_t q = 0; q < 2; ++q) CHECK(std::abs(cal.value[q] - ro.calibration(q)) < 4 * cal.stderr_[q]);
    const auto m = trex_mitigate({{0.45, 0.01}}, {{0.9, 0.002}});
    CHECK(std::abs(m[0].value - 0.5) < 1e-15);
    CHECK(std::abs(m[0].stderr_ - std::hypot(0.01 / 0.9, 0.45 * 0.002 / 0.81)) < 1e-15);
    CHECK_THROWS_AS(trex_mitigate({{0.4, 0.01}}, {{0.0, 0.1}}), InvalidArgument);
  }

  TEST_CASE("shot file round trip") {
    const auto c = build_brickwork({std::numbers::pi / 4, std::numbers::pi / 4, 0.1, 5, 1});
    std::mt19937_64 rng(3);
    const auto settings = sample_settings(signal_biased_distributions(5, 1), 7, rng);
    const auto recs = generate_shots(c, NoiseModel::noiseless(5), ReadoutNoise::uniform(5, 0.1), settings,
                                     {.shots_per_setting = 3, .seed = 1});
    std::stringstream ss;
    write_shots(ss, 5, recs);
    std::size_t n_read = 0;
    const auto back = read_shots(ss, &n_read);
    CHECK(n_read == 5);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK(back[i].setting_id == recs[i].setting_id);
      CHECK(back[i].bases == recs[i].bases);
      CHECK(back[i].twirl_seed == recs[i].twirl_seed);
      CHECK(back[i].flip_mask == recs[i].flip_mask);
      CHECK(back[i].outcome == recs[i].outcome);
    }
    std::stringstream bad("# dutem-shots v1 n_qubits=5\nsetting_id,bases,twirl_seed,flip_mask,outcome\n0,XXQ,1,0,0\n");
    CHECK_THROWS(read_shots(bad));
  }
}

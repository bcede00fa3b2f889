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
#include <random>

#include "doctest.h"
#include "dutem/error.hpp"
#include "dutem/exact_sim.hpp"
#include "dutem/learning.hpp"
#include "dutem/nnls.hpp"
#include "dutem/noise.hpp"

using namespace dutem;

namespace {

PauliLindbladChannel random_channel(std::size_t n, std::uint64_t seed, Parity slot, double scale = 0.01) {
  const SparseBasis b(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, scale);
  std::vector<double> r;
  for (std::size_t i = 0; i < b.size(); ++i) r.push_back(u(rng));
  return PauliLindbladChannel::sparse(b, r, slot);
}

NoiseModel random_model(std::size_t n, std::uint64_t seed, double scale = 0.01) {
  return {random_channel(n, seed, Parity::even, scale), random_channel(n, seed + 1, Parity::odd, scale)};
}

struct SlotSetup {
  SparseBasis basis;
  CliffordLayer layer;
  BinaryMatrix m, mp;
};

SlotSetup setup(std::size_t n, Parity p) {
  SparseBasis b(n);
  const CliffordLayer cl = CliffordLayer::from_gates(n, clifford_layer(n, p).gates);
  auto [m, mp] = build_anticommutation_matrices(b, cl);
  return {b, cl, m, mp};
}

}  // namespace

TEST_SUITE("learning") {
  TEST_CASE("NNLS solves a small problem with an active constraint") {
    Eigen::MatrixXd a(3, 2);
    a << 1, 0, 0, 1, 1, 1;
    Eigen::VectorXd b(3);
    b << 2, -1, 1;
    const auto r = nnls(a, b);
    CHECK(r.converged);
    CHECK(r.x(1) == 0.0);
    CHECK(std::abs(r.x(0) - 1.5) < 1e-12);
    const auto u = nnls(a, a * Eigen::Vector2d(0.3, 0.7));
    CHECK((u.x - Eigen::Vector2d(0.3, 0.7)).norm() < 1e-12);
  }

  TEST_CASE("decay fit recovers exact exponentials") {
    DecayData d;
    d.pauli = PauliString::from_text("XI");
    for (double depth : {0.0, 2.0, 6.0, 12.0, 20.0, 34.0}) {
      d.depths.push_back(depth);
      d.means.push_back(0.97 * std::pow(0.985, depth));
    }
    const auto f = fit_decay(d);
    CHECK(std::abs(f.pair_fidelity - 0.985) < 1e-10);
    CHECK(std::abs(f.spam - 0.97) < 1e-10);
    CHECK(f.residual < 1e-12);
    CHECK(!f.flagged);

    for (auto& m : d.means) m = 0.9;
    const auto flat = fit_decay(d);
    CHECK(std::abs(flat.pair_fidelity - 1.0) < 1e-12);

    DecayData short_d = d;
    short_d.depths = {0, 2};
    short_d.means = {1, 1};
    CHECK_THROWS_AS(fit_decay(short_d), InvalidArgument);
  }

  TEST_CASE("decay fit drops points consistent with zero") {
    DecayData d;
    d.pauli = PauliString::from_text("Z");
    d.depths = {0, 2, 6, 12};
    d.means = {1.0, 0.81, 0.531441, 0.001};
    d.stderrs = {0.01, 0.01, 0.01, 0.01};
    const auto f = fit_decay(d);
    CHECK(f.dropped[3]);
    CHECK(f.flagged);
    CHECK(std::abs(f.pair_fidelity - 0.9) < 1e-3);
  }

  TEST_CASE("parallel eigenstate settings cover the sparse basis") {
    for (std::size_t n : {3u, 5u, 7u, 9u, 21u}) {
      const auto s = parallel_eigenstate_settings(n);
      CHECK(s.size() == 9);
      CHECK(covers_basis(s, SparseBasis(n)));
    }
    const auto s = parallel_eigenstate_settings(5);
    const auto k = covering_setting(s, PauliString::from_text("XIZII"));
    REQUIRE(k.has_value());
    CHECK(s[*k][0] == PauliLetter::X);
    CHECK(s[*k][2] == PauliLetter::Z);
    std::vector<std::vector<PauliLetter>> only_z{std::vector<PauliLetter>(5, PauliLetter::Z)};
    CHECK(!covers_basis(only_z, SparseBasis(5)));
  }

  TEST_CASE("exact cycle benchmark gives the pair fidelities") {
    const std::size_t n = 5;
    for (auto par : {Parity::even, Parity::odd}) {
      const auto truth = random_channel(n, 31, par, 0.02);
      const Layer l = clifford_layer(n, par);
      const auto data = synth_cycle_benchmark(l, n, truth, {.exact = true});
      const auto fs = fidelity_set(truth, SparseBasis(n), CliffordLayer::from_gates(n, l.gates));
      CHECK(data.size() == SparseBasis(n).size());
      for (const auto& f : fit_pair_fidelities(data)) {
        CHECK(std::abs(f.pair_fidelity - fs.pair(f.pauli)) < 1e-10);
        CHECK(std::abs(f.spam - std::pow(1 - 2 * 1.53e-2, double(f.pauli.weight()))) < 1e-10);
      }
    }
  }

  TEST_CASE("noisy cycle benchmark fits within error bars") {
    const std::size_t n = 5;
    const auto truth = random_channel(n, 32, Parity::even, 0.02);
    const Layer l = clifford_layer(n, Parity::even);
    const auto fs = fidelity_set(truth, SparseBasis(n), CliffordLayer::from_gates(n, l.gates));
    const auto fits = fit_pair_fidelities(synth_cycle_benchmark(l, n, truth, {.settings = 64, .shots = 32, .seed = 3}));
    std::size_t inside = 0;
    for (const auto& f : fits) inside += std::abs(f.pair_fidelity - fs.pair(f.pauli)) < 3 * f.pair_fidelity_stderr;
    CHECK(inside >= fits.size() * 9 / 10);
  }

  TEST_CASE("generators are recovered with the true splits") {
    const std::size_t n = 5;
    for (auto par : {Parity::even, Parity::odd}) {
      const auto s = setup(n, par);
      const auto truth = random_channel(n, 33, par, 0.02);
      std::vector<double> pair, alpha;
      for (const auto& p : s.basis.entries()) {
        const double f = truth.fidelity(p), fp = truth.fidelity(s.layer.conjugate(p));
        pair.push_back(std::sqrt(f * fp));
        alpha.push_back(f / std::sqrt(f * fp));
      }
      const auto fit = fit_generators(s.basis, pair, alpha, s.m, s.mp, par);
      CHECK(fit.converged);
      for (std::size_t k = 0; k < s.basis.size(); ++k) CHECK(std::abs(fit.channel.rates()[k] - truth.rates()[k]) < 1e-8);
      for (std::size_t k = 0; k < s.basis.size(); ++k) CHECK(std::abs(fit.predicted_pair[k] - pair[k]) < 1e-10);

      const std::vector<double> ones(s.basis.size(), 1.0);
      const auto zero = fit_generators(s.basis, ones, ones, s.m, s.mp, par);
      for (double r : zero.channel.rates()) CHECK(r == 0.0);
    }
  }

  TEST_CASE("weight-3 noise leaves a residual") {
    const std::size_t n = 5;
    const auto s = setup(n, Parity::even);
    const PauliLindbladChannel truth(n, {PauliString::from_text("XYZII")}, {0.02}, Parity::even);
    std::vector<double> pair, alpha;
    for (const auto& p : s.basis.entries()) {
      const double f = truth.fidelity(p), fp = truth.fidelity(s.layer.conjugate(p));
      pair.push_back(std::sqrt(f * fp));
      alpha.push_back(f / std::sqrt(f * fp));
    }
    CHECK(fit_generators(s.basis, pair, alpha, s.m, s.mp, Parity::even).residual > 1e-4);
  }

  TEST_CASE("conjugated noise is indistinguishable in cycle benchmarks") {
    // The Clifford layer squares to the identity on the sparse basis, so U Lambda U^dag
    // has the same pair fidelities with swapped splits.
    const std::size_t n = 5;
    const Layer l = clifford_layer(n, Parity::even);
    const CliffordLayer cl = CliffordLayer::from_gates(n, l.gates);
    const auto truth = random_channel(n, 34, Parity::even, 0.02);
    std::vector<PauliString> gens;
    for (const auto& g : truth.generators()) gens.push_back(cl.conjugate(g));
    const PauliLindbladChannel conj(n, gens, truth.rates(), Parity::even);
    const auto a = synth_cycle_benchmark(l, n, truth, {.exact = true});
    const auto b = synth_cycle_benchmark(l, n, conj, {.exact = true});
    REQUIRE(a.size() == b.size());
    bool differ = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t k = 0; k < a[i].means.size(); ++k) {
        if (std::fmod(a[i].depths[k], 2.0) == 0.0) CHECK(std::abs(a[i].means[k] - b[i].means[k]) < 1e-12);
      }
      const auto& p = a[i].pauli;
      differ = differ || std::abs(truth.fidelity(p) - conj.fidelity(p)) > 1e-6;
    }
    CHECK(differ);
  }

  TEST_CASE("fine-tuning reproduces exact Clifford signals") {
    const std::size_t n = 5;
    const NoiseModel truth = random_model(n, 35, 0.02);
    const auto se = setup(n, Parity::even), so = setup(n, Parity::odd);
    auto fits_for = [&](Parity par) {
      return fit_pair_fidelities(synth_cycle_benchmark(clifford_layer(n, par), n, truth[par], {.exact = true}));
    };
    SlotFidelities even(Parity::even, se.basis, se.layer, fits_for(Parity::even));
    SlotFidelities odd(Parity::odd, so.basis, so.layer, fits_for(Parity::odd));
    const auto points = synth_clifford_signal(n, 2, truth, 0, 0);
    const auto rep = finetune_splits(points, even, odd, NoiseModel::noiseless(n));
    for (const auto& seg : rep.segments) {
      CHECK(!seg.violation);
      CHECK(seg.delta >= 0.0);
      CHECK(seg.delta <= 1.0);
    }
    for (const auto& pt : points) {
      CHECK(std::abs(split_model_prediction(pt.circuit, pt.observable, even, odd, NoiseModel::noiseless(n)) - pt.value) <
            1e-9);
    }
    // The tuned model still matches every pair fidelity.
    for (const auto& p : even.pairs()) {
      const double fa = *even.fidelity(p.a), fb = *even.fidelity(p.b);
      CHECK(std::abs(std::sqrt(fa * fb) - p.pair) < 1e-12);
    }
  }

  TEST_CASE("unreachable Clifford targets are reported") {
    const std::size_t n = 5;
    const NoiseModel truth = random_model(n, 36, 0.02);
    const auto se = setup(n, Parity::even), so = setup(n, Parity::odd);
    auto make = [&](Parity par, const SlotSetup& s) {
      return SlotFidelities(par, s.basis, s.layer,
                            fit_pair_fidelities(synth_cycle_benchmark(clifford_layer(n, par), n, truth[par], {.exact = true})));
    };
    SlotFidelities even = make(Parity::even, se), odd = make(Parity::odd, so);
    auto points = synth_clifford_signal(n, 2, truth, 0, 0);
    points[2].value = 1.5;
    CHECK_THROWS_AS(finetune_splits(points, even, odd, NoiseModel::noiseless(n)), ModelViolation);
    even.reset_splits();
    odd.reset_splits();
    const auto rep = finetune_splits(points, even, odd, NoiseModel::noiseless(n), false);
    bool flagged = false;
    for (const auto& s : rep.segments) flagged = flagged || s.violation;
    CHECK(flagged);
  }

  TEST_CASE("validation of a model against itself has zero discrepancy") {
    const NoiseModel m = random_model(5, 37);
    const auto rep = validate_model(m, m, 5, {2, 4});
    CHECK(!rep.entries.empty());
    for (const auto& [fam, by_depth] : rep.max_deviation)
      for (const auto& [d, v] : by_depth) CHECK(v == 0.0);
    CHECK(rep.max_deviation.count("mirror") == 1);
  }

  TEST_CASE("end-to-end learning on exact data reproduces the Clifford signal") {
    const std::size_t n = 5;
    const NoiseModel truth = random_model(n, 38, 0.01);
    LearningOptions opts;
    opts.cycle.exact = true;
    opts.clifford_t_max = 2;
    opts.clifford_shots = 0;
    const auto r = learn_noise_model(n, truth, opts);
    CHECK(r.model.even.physical());
    CHECK(r.model.odd.physical());
    for (const auto& pt : r.clifford) {
      const double v = pauli_propagation(pt.circuit, r.model, pt.observable).value;
      CHECK(std::abs(v - pt.value) < 1e-3 * std::abs(pt.value));
    }
    // Pair fidelities are reproduced by both fitted models.
    for (auto par : {Parity::even, Parity::odd}) {
      const auto s = setup(n, par);
      const auto ft = fidelity_set(truth[par], s.basis, s.layer);
      const auto fm = fidelity_set(r.model[par], s.basis, s.layer);
      for (const auto& p : s.basis.entries()) CHECK(std::abs(fm.pair(p) - ft.pair(p)) < 1e-3);
    }
    CHECK(r.report().contains("splits"));
  }
}

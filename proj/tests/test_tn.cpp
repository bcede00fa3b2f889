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

#include "dense_oracle.hpp"
#include "doctest.h"
#include "dutem/error.hpp"
#include "dutem/exact_sim.hpp"
#include "dutem/measurement.hpp"
#include "dutem/noise.hpp"
#include "dutem/tn.hpp"

using namespace dutem;
using namespace dutem::tn;

namespace {

constexpr double kQuarter = std::numbers::pi / 4;

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

Mps<double> random_mps(std::size_t n, std::size_t d, std::size_t chi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Mps<double> m(n, d);
  for (std::size_t q = 0; q < n; ++q) {
    Tensor3<double> t(q == 0 ? 1 : chi, d, q + 1 == n ? 1 : chi);
    for (auto& x : t.data) x = g(rng);
    m.set_site(q, t);
  }
  return m;
}

oracle::Mat layer_unitary(const Layer& l, std::size_t n) {
  oracle::Mat u = oracle::Mat::Identity(std::size_t{1} << n, std::size_t{1} << n);
  for (const auto& g : l.gates) u = oracle::embed(n, g.qubits, g.matrix) * u;
  return u;
}

// Dense PTM of one noisy step: the layer after its channel.
Eigen::MatrixXd noisy_step_ptm(const Layer& l, const NoiseModel& m, std::size_t n) {
  const Eigen::MatrixXd u = oracle::ptm(oracle::unitary_superop(layer_unitary(l, n)), n);
  return u * Eigen::MatrixXd(ptm_diagonal(m[l.noise_slot]).dense().asDiagonal());
}

}  // namespace

TEST_SUITE("tn") {
  TEST_CASE("canonical forms preserve the state") {
    auto m = random_mps(6, 3, 4, 1);
    const auto v = m.to_dense();
    for (std::size_t q : {0u, 3u, 5u}) {
      m.canonicalize(q);
      CHECK(m.center() == int(q));
      CHECK(m.is_canonical());
      CHECK((m.to_dense() - v).norm() < 1e-10 * v.norm());
    }
    CHECK(std::abs(m.norm() - v.norm()) < 1e-10 * v.norm());
    CHECK(std::abs(m.dot(m) - v.squaredNorm()) < 1e-9 * v.squaredNorm());
  }

  TEST_CASE("two-site gates match the dense operator") {
    const std::size_t n = 5;
    StateMps psi = StateMps::product(std::vector<std::vector<std::complex<double>>>(n, {1.0, 0.0}));
    std::mt19937_64 rng(2);
    Eigen::VectorXcd dense = psi.to_dense();
    for (std::size_t q : {0u, 2u, 1u, 3u}) {
      const Eigen::MatrixXcd u = oracle::expi(oracle::Mat::Random(4, 4) + oracle::Mat::Random(4, 4).adjoint());
      psi.apply_two_site(q, u, CompressionPolicy::exact());
      // to_dense puts site 0 most significant, so site q is the higher factor of the pair.
      const Eigen::MatrixXcd full = Eigen::kroneckerProduct(
          Eigen::kroneckerProduct(Eigen::MatrixXcd::Identity(1 << q, 1 << q), u).eval(),
          Eigen::MatrixXcd::Identity(1 << (n - q - 2), 1 << (n - q - 2)));
      dense = full * dense;
      CHECK((psi.to_dense() - dense).norm() < 1e-10);
    }
    CHECK(std::abs(psi.norm() - 1.0) < 1e-10);
  }

  TEST_CASE("compression policies") {
    auto m = random_mps(8, 2, 8, 3);
    m.scale(1.0 / m.norm());
    auto capped = m;
    const auto log = capped.compress(CompressionPolicy::hard_cap(3));
    CHECK(capped.max_bond() <= 3);
    CHECK(log.max_kept() <= 3);
    CHECK(log.total_discarded() > 0);
    auto exact = m;
    exact.compress(CompressionPolicy::exact());
    CHECK((exact.to_dense() - m.to_dense()).norm() < 1e-10);
    auto cut = m;
    const auto lc = cut.compress(CompressionPolicy::relative_cutoff(1e-2));
    for (const auto& r : lc.records) CHECK(r.discarded < 1e-2);
    CHECK(cut.max_bond() <= m.max_bond());
  }

  TEST_CASE("Bell pair entropy is one bit") {
    StateMps psi = StateMps::product({{1.0, 0.0}, {1.0, 0.0}});
    psi.apply_one_site(0, gates::hadamard());
    psi.apply_two_site(0, gates::cnot(), CompressionPolicy::exact());
    CHECK(std::abs(psi.bond_entropies()[0] - 1.0) < 1e-12);
    CHECK(std::abs(psi.max_entropy() - 1.0) < 1e-12);
  }

  TEST_CASE("layer MPO equals the dense PTM") {
    const std::size_t n = 4;
    for (auto par : {Parity::even, Parity::odd}) {
      const Layer l = make_layer(n, par, two_qubit_block({0.7, 0.4, 0.2, n, 0}), par);
      const Eigen::MatrixXd ref = oracle::ptm(oracle::unitary_superop(layer_unitary(l, n)), n);
      CHECK((mpo_from_layer(l, n).to_dense() - ref).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((mpo_from_layer(l, n, true).to_dense() - ref.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
    const auto ch = random_model(n, 4, 0.05).even;
    const Eigen::VectorXd d = ptm_diagonal(ch).dense();
    CHECK((PtmMpo::from_diagonal(ptm_diagonal(ch)).to_dense() - Eigen::MatrixXd(d.asDiagonal())).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK((PtmMpo::identity(n).to_dense() - Eigen::MatrixXd::Identity(256, 256)).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("Schrodinger and Heisenberg evolution match the statevector") {
    const std::size_t n = 7;
    const auto c = build_brickwork({0.5, 0.8, 0.3, n, 3});
    const StateMps psi = schrodinger_evolve(c, CompressionPolicy::exact());
    for (std::size_t q : {0u, 3u, 6u}) {
      for (auto l : {PauliLetter::X, PauliLetter::Z}) {
        const auto o = PauliString::single(n, q, l);
        const double ref = statevector_expectation(c, o);
        CHECK(std::abs(state_expectation(psi, o) - ref) < 1e-10);
        CHECK(std::abs(heisenberg_expectation(c, o, CompressionPolicy::exact()) - ref) < 1e-10);
      }
    }
    const auto o = PauliString::from_text("IIXZIII");
    CHECK(std::abs(state_expectation(psi, o) - statevector_expectation(c, o)) < 1e-10);
  }

  TEST_CASE("noisy Heisenberg evolution matches the density matrix") {
    const std::size_t n = 5;
    const auto c = build_brickwork({kQuarter, kQuarter, 0.2, n, 2}, {.state_prep_layer = true});
    const NoiseModel m = random_model(n, 5, 0.03);
    const auto o = PauliString::single(n, 2, PauliLetter::X);
    CHECK(std::abs(heisenberg_expectation(c, o, CompressionPolicy::exact(), &m) - noisy_expectation_dm(c, m, o)) < 1e-10);
  }

  TEST_CASE("bond cap is respected during evolution") {
    const std::size_t n = 9;
    const auto c = build_brickwork({0.5, 0.8, 0.3, n, 4});
    EvolutionResult info;
    const StateMps psi = schrodinger_evolve(c, CompressionPolicy::hard_cap(2), &info);
    CHECK(psi.max_bond() <= 2);
    CHECK(info.log.max_kept() <= 2);
    CHECK(info.max_entropy_per_layer.size() == c.depth());
  }

  TEST_CASE("snapshot round trip") {
    const auto m = random_mps(5, 16, 3, 6);
    std::stringstream ss;
    save_snapshot(ss, m, true);
    bool is_mpo = false;
    const auto back = load_snapshot(ss, &is_mpo);
    CHECK(is_mpo);
    REQUIRE(back.size() == m.size());
    for (std::size_t q = 0; q < m.size(); ++q) CHECK(back.site(q).data == m.site(q).data);
    std::stringstream bad("XXXXjunk");
    CHECK_THROWS(load_snapshot(bad));
  }

  TEST_CASE("convergence report extrapolates in 1/chi") {
    const std::vector<double> chis{4, 8, 16, 32};
    std::vector<double> v;
    for (double c : chis) v.push_back(0.5 + 0.8 / c);
    const auto r = convergence_report(chis, v);
    CHECK(std::abs(r.extrapolated - 0.5) < 1e-12);
    CHECK(std::abs(r.successive_differences[1] - 0.1) < 1e-12);
    CHECK(r.successive_differences[0] == 0.0);
    CHECK(std::abs(r.delta_chi[3] - 0.025) < 1e-12);
    CHECK_THROWS_AS(convergence_report({4, 8}, {1, 2}), InvalidArgument);
  }
}

TEST_SUITE("tem") {
  TEST_CASE("mitigation map composes with the noisy circuit to the ideal one") {
    const std::size_t n = 4;
    BrickworkCircuit c = build_brickwork({0.6, 0.7, 0.2, 5, 2}, {.state_prep_layer = true});
    // Rebuild the same layer pattern on four qubits for a dense check.
    c.n_qubits = n;
    c.layers = {make_layer(n, Parity::odd, two_qubit_block({0.6, 0.7, 0.2, n, 0}), Parity::odd),
                make_layer(n, Parity::even, two_qubit_block({0.6, 0.7, 0.2, n, 0}), Parity::even),
                make_layer(n, Parity::odd, two_qubit_block({0.3, 0.9, 0.1, n, 0}), Parity::odd)};
    const NoiseModel m = random_model(n, 7, 0.04);
    Eigen::MatrixXd ideal = Eigen::MatrixXd::Identity(256, 256), noisy = ideal;
    for (const auto& l : c.layers) {
      ideal = oracle::ptm(oracle::unitary_superop(layer_unitary(l, n)), n) * ideal;
      noisy = noisy_step_ptm(l, m, n) * noisy;
    }
    const TemMap map = build_tem_map(c, m, {.policy = CompressionPolicy::exact()});
    CHECK(map.layers == 3);
    const Eigen::MatrixXd md = map.mpo.to_dense();
    CHECK((md * noisy - ideal).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("zero noise gives the identity map") {
    const auto c = build_brickwork({kQuarter, kQuarter, 0.1, 5, 2});
    const TemMap map = build_tem_map(c, NoiseModel::noiseless(5), {.policy = CompressionPolicy::exact()});
    const auto o = PauliString::single(5, 2, PauliLetter::X);
    CHECK(std::abs(leading_coefficient(modify_observable(map, o), o) - 1.0) < 1e-10);
    const PtmMps mod = modify_observable(map, o);
    CHECK(std::abs(mod.norm() - 1.0) < 1e-10);
  }

  TEST_CASE("modified observable on the noisy state gives the ideal value") {
    const std::size_t n = 5;
    auto mitigated = [&](double h, bool cone) {
      const auto c = build_brickwork({kQuarter, kQuarter, h, n, 2}, {.state_prep_layer = true});
      const NoiseModel m = random_model(n, 8, 0.02);
      const auto o = PauliString::single(n, 2, PauliLetter::X);
      TemOptions opts{CompressionPolicy::exact(), {}};
      if (cone) opts.light_cone_site = 2;
      const Eigen::VectorXd coef = modify_observable(build_tem_map(c, m, opts), o).to_dense();
      const DensityMatrix rho = final_density_matrix(c, m);
      double v = 0;
      for (Eigen::Index a = 0; a < coef.size(); ++a) {
        if (coef(a) != 0.0) v += coef(a) * rho.expectation(PauliString::from_text(oracle::ptm_letters(a, n)));
      }
      return std::pair{v, statevector_expectation(c, o)};
    };
    for (double h : {0.0, 0.1}) {
      const auto [v, ideal] = mitigated(h, false);
      CHECK(std::abs(v - ideal) < 1e-9);
    }
    // The light-cone map inverts only noise overlapping the cone: exact for
    // Clifford circuits, a close approximation otherwise.
    const auto [vc, ic] = mitigated(0.0, true);
    CHECK(std::abs(vc - ic) < 1e-9);
    const auto [vn, in] = mitigated(0.1, true);
    CHECK(std::abs(vn - in) < 1e-3);
  }

  TEST_CASE("shot-based mitigated estimate is unbiased") {
    const std::size_t n = 5;
    const auto c = build_brickwork({kQuarter, kQuarter, 0.1, n, 2}, {.state_prep_layer = true});
    const NoiseModel m = random_model(n, 9, 0.03);
    const auto o = PauliString::single(n, 2, PauliLetter::X);
    const auto dists = signal_biased_distributions(n, 2);
    std::mt19937_64 rng(10);
    const auto settings = sample_settings(dists, 256, rng);
    const auto recs = generate_shots(c, m, ReadoutNoise::none(n), settings, {.shots_per_setting = 128, .seed = 11});
    const TemMap map = build_tem_map(c, m, {});
    const auto e = mitigated_estimate(recs, map, o, dists);
    CHECK(std::abs(e.value - statevector_expectation(c, o)) < 4 * e.stderr_);
  }
}

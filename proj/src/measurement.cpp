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

#include "dutem/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "dutem/error.hpp"
#include "dutem/exact_sim.hpp"
#include "dutem/kernels.hpp"
#include "dutem/tn.hpp"

namespace dutem {

void BasisDistribution::validate() const {
  if (!(px > 0 && py > 0 && pz > 0)) throw InvalidArgument("basis probabilities must be strictly positive");
  if (std::abs(px + py + pz - 1.0) > 1e-12) throw InvalidArgument("basis probabilities must sum to 1");
}

std::vector<BasisDistribution> signal_biased_distributions(std::size_t n, std::size_t signal_qubit) {
  if (signal_qubit >= n) throw InvalidArgument("signal qubit out of range");
  std::vector<BasisDistribution> d(n, BasisDistribution::uniform());
  d[signal_qubit] = BasisDistribution::signal_biased();
  return d;
}

std::vector<MeasurementSetting> sample_settings(const std::vector<BasisDistribution>& dists, std::size_t count,
                                                std::mt19937_64& rng) {
  for (const auto& d : dists) d.validate();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<MeasurementSetting> out(count);
  for (auto& s : out) {
    s.bases.resize(dists.size());
    for (std::size_t q = 0; q < dists.size(); ++q) {
      const double r = u(rng);
      s.bases[q] = r < dists[q].px ? Basis::X : (r < dists[q].px + dists[q].py ? Basis::Y : Basis::Z);
    }
    s.twirl_seed = rng();
  }
  return out;
}

std::mt19937_64 seed_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
  return std::mt19937_64(seq);
}

namespace {

Eigen::Matrix2cd basis_rotation(Basis b) {
  switch (b) {
    case Basis::X: return gates::hadamard();
    case Basis::Y: return gates::hadamard() * gates::phase_s().adjoint();
    default: return Eigen::Matrix2cd::Identity();
  }
}

std::uint8_t read_bit(std::uint8_t physical, std::size_t q, const ReadoutNoise& ro, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double p = physical ? ro.p10[q] : ro.p01[q];
  return (p > 0 && u(rng) < p) ? physical ^ 1u : physical;
}

void finish_shot(ShotRecord& rec, std::uint64_t bits, std::size_t n, const ReadoutNoise& ro, bool trex,
                 std::mt19937_64& rng) {
  rec.flip_mask.assign(n, 0);
  rec.outcome.assign(n, 0);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t q = 0; q < n; ++q) {
    const std::uint8_t f = trex && coin(rng) ? 1 : 0;
    const std::uint8_t b = static_cast<std::uint8_t>((bits >> q) & 1u);
    rec.flip_mask[q] = f;
    rec.outcome[q] = read_bit(b ^ f, q, ro, rng);
  }
}

std::uint64_t sample_index(const std::vector<double>& cdf, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, cdf.back());
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u(rng));
  return static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

std::vector<double> cdf_of(const Eigen::VectorXcd& amps) {
  std::vector<double> cdf(amps.size());
  double acc = 0;
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    acc += std::norm(amps(i));
    cdf[i] = acc;
  }
  return cdf;
}

}  // namespace

std::vector<ShotRecord> generate_shots(const BrickworkCircuit& c, const NoiseModel& noise, const ReadoutNoise& readout,
                                       const std::vector<MeasurementSetting>& settings, const ShotOptions& opts) {
  const std::size_t n = c.n_qubits;
  if (readout.n_qubits() != n) throw SizeMismatch("readout noise size mismatch");
  for (const auto& s : settings) {
    if (s.bases.size() != n) throw SizeMismatch("setting basis count mismatch");
  }
  const std::size_t m = opts.shots_per_setting;
  std::vector<ShotRecord> out(settings.size() * m);

  if (opts.backend == ShotBackend::density) {
    const DensityMatrix rho = final_density_matrix(c, noise);
    const auto count = static_cast<std::int64_t>(settings.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t ci = 0; ci < count; ++ci) {
      const auto& setting = settings[ci];
      std::mt19937_64 rng = seed_stream(opts.seed, static_cast<std::uint64_t>(ci));
      DensityMatrix r = rho;
      for (std::size_t q = 0; q < n; ++q) {
        if (setting.bases[q] != Basis::Z) r.apply(gates::single(q, basis_rotation(setting.bases[q])));
      }
      std::vector<double> cdf(r.matrix().rows());
      double acc = 0;
      for (Eigen::Index i = 0; i < r.matrix().rows(); ++i) {
        acc += std::max(0.0, r.matrix()(i, i).real());
        cdf[i] = acc;
      }
      for (std::size_t s = 0; s < m; ++s) {
        ShotRecord& rec = out[ci * m + s];
        rec.setting_id = static_cast<std::uint32_t>(ci);
        rec.bases = setting.bases;
        rec.twirl_seed = setting.twirl_seed;
        finish_shot(rec, sample_index(cdf, rng), n, readout, opts.trex, rng);
      }
    }
    return out;
  }

  const Statevector start = Statevector::prepare(c.initial, n);
  const auto count = static_cast<std::int64_t>(settings.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t ci = 0; ci < count; ++ci) {
    const auto& setting = settings[ci];
    std::mt19937_64 rng = seed_stream(opts.seed, static_cast<std::uint64_t>(ci));
    std::mt19937_64 twirl_rng(setting.twirl_seed);
    std::vector<TwirlDressing> twirls;
    for (const auto& l : c.layers) twirls.push_back(twirl_layer(l, n, twirl_rng));
    for (std::size_t s = 0; s < m; ++s) {
      Statevector psi = start;
      for (std::size_t k = 0; k < c.layers.size(); ++k) {
        const Layer& l = c.layers[k];
        psi.apply_pauli(twirls[k].before);
        psi.apply_pauli(noise[l.noise_slot].sample_error(rng));
        psi.apply(l);
        for (const auto& g : twirls[k].after) psi.apply(g);
      }
      for (std::size_t q = 0; q < n; ++q) {
        if (setting.bases[q] != Basis::Z) psi.apply(gates::single(q, basis_rotation(setting.bases[q])));
      }
      ShotRecord& rec = out[ci * m + s];
      rec.setting_id = static_cast<std::uint32_t>(ci);
      rec.bases = setting.bases;
      rec.twirl_seed = setting.twirl_seed;
      finish_shot(rec, sample_index(cdf_of(psi.amplitudes()), rng), n, readout, opts.trex, rng);
    }
  }
  return out;
}

Eigen::Matrix<double, 6, 4> dual_table(const BasisDistribution& d, double calibration) {
  if (calibration <= 0) throw InvalidArgument("calibration must be positive");
  Eigen::Matrix<double, 6, 4> t = Eigen::Matrix<double, 6, 4>::Zero();
  for (int b = 1; b <= 3; ++b) {
    const double inv = 1.0 / (d.p(static_cast<Basis>(b)) * calibration);
    for (int bit = 0; bit < 2; ++bit) {
      const int m = 2 * (b - 1) + bit;
      t(m, 0) = 1.0;
      t(m, b) = bit ? -inv : inv;
    }
  }
  return t;
}

Eigen::Matrix2cd dual_operator(const BasisDistribution& d, Basis b, int bit) {
  const double s = bit ? -1.0 : 1.0;
  return 0.5 * (Eigen::Matrix2cd::Identity() + (s / d.p(b)) * gates::pauli(static_cast<int>(b)));
}

Eigen::Matrix2cd povm_effect(const BasisDistribution& d, Basis b, int bit) {
  const double s = bit ? -1.0 : 1.0;
  return d.p(b) * 0.5 * (Eigen::Matrix2cd::Identity() + s * gates::pauli(static_cast<int>(b)));
}

Estimate grouped_estimate(const std::vector<std::uint32_t>& setting_ids, const std::vector<double>& xi) {
  if (xi.empty()) throw InvalidArgument("no shots to estimate from");
  if (setting_ids.size() != xi.size()) throw SizeMismatch("setting ids and values differ in length");
  std::map<std::uint32_t, std::pair<double, std::size_t>> groups;
  double total = 0;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    auto& g = groups[setting_ids[i]];
    g.first += xi[i];
    g.second += 1;
    total += xi[i];
  }
  const double s_count = static_cast<double>(xi.size());
  const double c_count = static_cast<double>(groups.size());
  const double mean = total / s_count;
  double within = 0;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const auto& g = groups[setting_ids[i]];
    const double d = xi[i] - g.first / g.second;
    within += d * d;
  }
  double between = 0;
  for (const auto& [id, g] : groups) {
    const double d = g.first / g.second - mean;
    between += d * d;
  }
  return {mean, std::sqrt(within / (s_count * s_count) + between / (c_count * c_count))};
}

Estimate estimate(const std::vector<ShotRecord>& records, const tn::Mps<double>& observable,
                  const std::vector<BasisDistribution>& dists, const std::vector<double>& calibration) {
  if (records.empty()) throw InvalidArgument("no shot records");
  const std::size_t n = observable.size();
  if (observable.phys_dim() != 4) throw SizeMismatch("observable MPS must have physical dimension 4");
  if (dists.size() != n) throw SizeMismatch("basis distribution count differs from observable size");
  if (!calibration.empty() && calibration.size() != n) throw SizeMismatch("calibration count mismatch");
  kernels::SelectorTensors sel;
  sel.mats.resize(n);
  for (std::size_t q = 0; q < n; ++q) {
    const auto table = dual_table(dists[q], calibration.empty() ? 1.0 : calibration[q]);
    const auto& a = observable.site(q);
    for (int mi = 0; mi < 6; ++mi) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(a.l, a.r);
      for (int alpha = 0; alpha < 4; ++alpha) {
        if (table(mi, alpha) == 0.0) continue;
        for (std::size_t l = 0; l < a.l; ++l)
          for (std::size_t r = 0; r < a.r; ++r) e(l, r) += table(mi, alpha) * a(l, alpha, r);
      }
      sel.mats[q].push_back(std::move(e));
    }
  }
  std::vector<std::uint8_t> outcomes(records.size() * n);
  std::vector<std::uint32_t> ids(records.size());
  for (std::size_t s = 0; s < records.size(); ++s) {
    const auto& r = records[s];
    if (r.bases.size() != n || r.outcome.size() != n) throw SizeMismatch("shot record size differs from observable");
    ids[s] = r.setting_id;
    for (std::size_t q = 0; q < n; ++q) {
      outcomes[s * n + q] = static_cast<std::uint8_t>(2 * (static_cast<int>(r.bases[q]) - 1) + r.corrected(q));
    }
  }
  std::vector<double> xi(records.size());
  kernels::parallel::contract_selectors(sel, outcomes.data(), records.size(), xi.data());
  return grouped_estimate(ids, xi);
}

Estimate estimate_pauli(const std::vector<ShotRecord>& records, const PauliString& observable,
                        const std::vector<BasisDistribution>& dists, const std::vector<double>& calibration) {
  return estimate(records, tn::pauli_mps(observable), dists, calibration);
}

TrexCalibration calibrate_trex(const ReadoutNoise& readout, std::size_t shots, std::mt19937_64& rng) {
  const std::size_t n = readout.n_qubits();
  TrexCalibration cal;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t q = 0; q < n; ++q) {
    double s = 0, s2 = 0;
    for (std::size_t k = 0; k < shots; ++k) {
      const std::uint8_t f = coin(rng) ? 1 : 0;
      const std::uint8_t out = read_bit(f, q, readout, rng) ^ f;
      const double z = out ? -1.0 : 1.0;
      s += z;
      s2 += z * z;
    }
    const double mean = s / shots;
    const double var = shots > 1 ? (s2 - shots * mean * mean) / (shots - 1) : 0.0;
    cal.value.push_back(mean);
    cal.stderr_.push_back(std::sqrt(std::max(var, 0.0) / shots));
  }
  return cal;
}

std::vector<Estimate> trex_mitigate(const std::vector<Estimate>& raw, const std::vector<Estimate>& calibration) {
  if (raw.size() != calibration.size()) throw SizeMismatch("calibration count differs from value count");
  std::vector<Estimate> out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double c = calibration[i].value;
    if (c <= 0) throw InvalidArgument("calibration value must be positive");
    const double v = raw[i].value / c;
    const double e = std::hypot(raw[i].stderr_ / c, raw[i].value * calibration[i].stderr_ / (c * c));
    out.push_back({v, e});
  }
  return out;
}

namespace {

std::string bits_to_hex(const std::vector<std::uint8_t>& bits) {
  const std::size_t nibbles = std::max<std::size_t>(1, (bits.size() + 3) / 4);
  std::string s(nibbles, '0');
  for (std::size_t k = 0; k < nibbles; ++k) {
    int v = 0;
    for (int j = 0; j < 4; ++j) {
      const std::size_t q = 4 * k + j;
      if (q < bits.size() && bits[q]) v |= 1 << j;
    }
    s[nibbles - 1 - k] = "0123456789abcdef"[v];
  }
  return s;
}

std::vector<std::uint8_t> hex_to_bits(const std::string& hex, std::size_t n) {
  std::vector<std::uint8_t> bits(n, 0);
  const std::size_t nibbles = hex.size();
  for (std::size_t k = 0; k < nibbles; ++k) {
    const char ch = hex[nibbles - 1 - k];
    int v;
    if (ch >= '0' && ch <= '9') v = ch - '0';
    else if (ch >= 'a' && ch <= 'f') v = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F') v = ch - 'A' + 10;
    else throw InvalidArgument("bad hex digit in shot file");
    for (int j = 0; j < 4; ++j) {
      const std::size_t q = 4 * k + j;
      if ((v >> j) & 1) {
        if (q >= n) throw InvalidArgument("hex value wider than qubit count");
        bits[q] = 1;
      }
    }
  }
  return bits;
}

}  // namespace

void write_shots(std::ostream& os, std::size_t n, const std::vector<ShotRecord>& records) {
  os << "# dutem-shots v1 n_qubits=" << n << "\n";
  os << "setting_id,bases,twirl_seed,flip_mask,outcome\n";
  for (const auto& r : records) {
    std::string b;
    for (auto x : r.bases) b += letter_char(static_cast<PauliLetter>(x));
    std::ostringstream seed;
    seed << std::hex << r.twirl_seed;
    os << r.setting_id << ',' << b << ',' << seed.str() << ',' << bits_to_hex(r.flip_mask) << ','
       << bits_to_hex(r.outcome) << '\n';
  }
}

std::vector<ShotRecord> read_shots(std::istream& is, std::size_t* n_out) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# dutem-shots v1 n_qubits=", 0) != 0) {
    throw InvalidArgument("missing shot file header");
  }
  const std::size_t n = std::stoul(line.substr(line.find('=') + 1));
  if (n_out) *n_out = n;
  std::getline(is, line);  // column names
  std::vector<ShotRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[5];
    for (auto& x : f) std::getline(ss, x, ',');
    ShotRecord r;
    r.setting_id = static_cast<std::uint32_t>(std::stoul(f[0]));
    if (f[1].size() != n) throw InvalidArgument("basis string length differs from qubit count");
    for (char ch : f[1]) {
      const auto l = letter_from_char(ch);
      if (l == PauliLetter::I) throw InvalidArgument("identity is not a measurement basis");
      r.bases.push_back(static_cast<Basis>(l));
    }
    r.twirl_seed = std::stoull(f[2], nullptr, 16);
    r.flip_mask = hex_to_bits(f[3], n);
    r.outcome = hex_to_bits(f[4], n);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace dutem

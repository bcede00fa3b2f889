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

#include <array>
#include <cstring>
#include <fstream>

#include "dutem/error.hpp"
#include "dutem/tn.hpp"

// Layout (all integers little-endian uint64 unless noted):
//   magic "DTNS" (4 bytes), version (uint32), kind (uint32: 0 = MPS, 1 = MPO),
//   scalar (uint32: 1 = float64), n_sites, phys_dim, then n_sites+1 bond sizes,
//   then each site tensor as l*d*r float64 values in [left][phys][right] order.

namespace dutem::tn {

namespace {

constexpr std::array<char, 4> kMagic{'D', 'T', 'N', 'S'};
constexpr std::uint32_t kVersion = 1;

template <class U>
void put(std::ostream& os, U v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(U));
}

template <class U>
U get(std::istream& is) {
  U v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(U));
  if (!is) throw InvalidArgument("truncated snapshot");
  return v;
}

}  // namespace

void save_snapshot(std::ostream& os, const Mps<double>& m, bool is_mpo) {
  os.write(kMagic.data(), 4);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, is_mpo ? 1 : 0);
  put<std::uint32_t>(os, 1);
  put<std::uint64_t>(os, m.size());
  put<std::uint64_t>(os, m.phys_dim());
  for (std::size_t b = 0; b <= m.size(); ++b) put<std::uint64_t>(os, m.bond(b));
  for (std::size_t q = 0; q < m.size(); ++q) {
    const auto& t = m.site(q);
    os.write(reinterpret_cast<const char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  }
}

Mps<double> load_snapshot(std::istream& is, bool* is_mpo) {
  std::array<char, 4> magic{};
  is.read(magic.data(), 4);
  if (!is || magic != kMagic) throw InvalidArgument("not a snapshot file");
  const auto version = get<std::uint32_t>(is);
  if (version != kVersion) throw InvalidArgument("unsupported snapshot version " + std::to_string(version));
  const auto kind = get<std::uint32_t>(is);
  if (get<std::uint32_t>(is) != 1) throw InvalidArgument("unsupported snapshot scalar type");
  const auto n = get<std::uint64_t>(is);
  const auto d = get<std::uint64_t>(is);
  std::vector<std::uint64_t> bonds(n + 1);
  for (auto& b : bonds) b = get<std::uint64_t>(is);
  Mps<double> m(n, d);
  for (std::size_t q = 0; q < n; ++q) {
    Tensor3<double> t(bonds[q], d, bonds[q + 1]);
    is.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    if (!is) throw InvalidArgument("truncated snapshot payload");
    m.set_site(q, std::move(t));
  }
  if (is_mpo) *is_mpo = kind == 1;
  return m;
}

void save_snapshot(const std::string& path, const Mps<double>& m, bool is_mpo) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("cannot open " + path);
  save_snapshot(os, m, is_mpo);
}

Mps<double> load_snapshot(const std::string& path, bool* is_mpo) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot open " + path);
  return load_snapshot(is, is_mpo);
}

}  // namespace dutem::tn

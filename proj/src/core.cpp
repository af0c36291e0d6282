//
// Copyright 2026 The dpcopula Authors
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
//

#include "dpcopula/core.hpp"

namespace dpcopula {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

std::size_t pair_count(int p) {
  if (p < 2) return 0;
  return static_cast<std::size_t>(p) * static_cast<std::size_t>(p - 1) / 2;
}

std::size_t pair_offset(int j, int jp, int p) {
  if (j < 0 || jp <= j || jp >= p) {
    throw ValidationError("pair_offset: require 0 <= j < jp < p");
  }
  // Pairs before row j: sum_{k<j} (p-1-k) = j*(2p-j-1)/2.
  const auto before = static_cast<std::size_t>(j) * static_cast<std::size_t>(2 * p - j - 1) / 2;
  return before + static_cast<std::size_t>(jp - j - 1);
}

std::vector<PairIndex> all_pairs(int p) {
  std::vector<PairIndex> out;
  out.reserve(pair_count(p));
  for (int j = 0; j < p; ++j) {
    for (int jp = j + 1; jp < p; ++jp) out.push_back({j, jp});
  }
  return out;
}

}  // namespace dpcopula

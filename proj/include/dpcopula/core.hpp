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

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpcopula {

// All randomness flows through explicitly passed engines of this type.
using Rng = std::mt19937_64;

// Mixes (master, stream) into an independent 64-bit seed (splitmix64
// finalizer applied twice). Used to split one master seed into per-replicate
// and per-purpose streams without any shared state.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Bad arguments or malformed input files. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable or unwritable files. Maps to CLI exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sampler or solver diagnostics that indicate an untrustworthy result.
// Maps to CLI exit code 4.
class DiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unordered variable pair with j < jp (0-based).
struct PairIndex {
  int j = 0;
  int jp = 0;
  friend bool operator==(const PairIndex&, const PairIndex&) = default;
};

// p(p-1)/2
std::size_t pair_count(int p);

// Position of (j, jp) in the canonical lexicographic pair order
// (0,1), (0,2), ..., (0,p-1), (1,2), ...
std::size_t pair_offset(int j, int jp, int p);

// All pairs in canonical order.
std::vector<PairIndex> all_pairs(int p);

}  // namespace dpcopula

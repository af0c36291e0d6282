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

// Median-quadrant count statistics.
//
// For every pair of columns (j, j') the statistic t_jj' counts records that sit
// in the upper half of both columns. Upper-half membership is decided by a
// strict total order on (value, key), where the keys are random tie-breakers
// drawn before the data are seen. Each column therefore has exactly
// half_n = ceil(n / 2) upper-half members and substituting one record moves
// any t_jj' by at most one.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpcopula/core.hpp"

namespace dpcopula {

// n x p matrix of finite observations, n >= 2 and p >= 2.
class Dataset {
 public:
  explicit Dataset(Eigen::MatrixXd values, std::vector<std::string> names = {});

  int n() const { return static_cast<int>(values_.rows()); }
  int p() const { return static_cast<int>(values_.cols()); }
  double operator()(int i, int j) const { return values_(i, j); }
  const Eigen::MatrixXd& values() const { return values_; }
  const std::vector<std::string>& names() const { return names_; }

 private:
  Eigen::MatrixXd values_;
  std::vector<std::string> names_;
};

struct TieKeyMatrix {
  Eigen::MatrixXd keys;        // n x p, iid N(0, 1)
  std::uint64_t seed = 0;      // provenance
  int regenerations = 0;       // columns redrawn because of duplicate keys
};

// Upper-half size: n/2 for even n, (n+1)/2 for odd n.
constexpr int half_count(int n) { return (n + 1) / 2; }

TieKeyMatrix generate_tie_keys(int n, int p, std::uint64_t seed);

// a_ij for column j: exactly half_count(n) ones.
std::vector<std::uint8_t> above_median_indicators(const Dataset& data, const TieKeyMatrix& keys,
                                                  int j);

struct PairCount {
  int j = 0;
  int jp = 0;
  int t = 0;
};

struct QuadrantCountSet {
  int n = 0;
  int p = 0;
  int half_n = 0;
  std::vector<PairCount> counts;  // canonical pair order

  int at(int j, int jp) const;
};

QuadrantCountSet quadrant_counts(const Dataset& data, const TieKeyMatrix& keys);

struct Sensitivity {
  int per_pair = 1;
  long long total = 0;
};

// Per-pair l1 sensitivity is 1; the whole collection is bounded by p(p-1)/2.
Sensitivity sensitivity(int p);

}  // namespace dpcopula

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

#include "dpcopula/quadrant_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dpcopula {
namespace {

bool has_duplicates(const Eigen::Ref<const Eigen::VectorXd>& column) {
  std::vector<double> sorted(column.data(), column.data() + column.size());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

void fill_normal(Eigen::Ref<Eigen::VectorXd> column, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < column.size(); ++i) column(i) = normal(rng);
}

}  // namespace

Dataset::Dataset(Eigen::MatrixXd values, std::vector<std::string> names)
    : values_(std::move(values)), names_(std::move(names)) {
  if (values_.rows() < 2 || values_.cols() < 2) {
    throw ValidationError("dataset needs n >= 2 records and p >= 2 variables");
  }
  if (!values_.allFinite()) {
    throw ValidationError("dataset contains NaN or infinite values");
  }
  if (!names_.empty() && static_cast<Eigen::Index>(names_.size()) != values_.cols()) {
    throw ValidationError("column name count does not match column count");
  }
}

TieKeyMatrix generate_tie_keys(int n, int p, std::uint64_t seed) {
  if (n < 1 || p < 1) throw ValidationError("generate_tie_keys: need n >= 1 and p >= 1");
  TieKeyMatrix out;
  out.seed = seed;
  out.keys.resize(n, p);
  for (int j = 0; j < p; ++j) {
    std::uint64_t column_seed = derive_seed(seed, static_cast<std::uint64_t>(j));
    fill_normal(out.keys.col(j), column_seed);
    std::uint64_t attempt = 0;
    while (has_duplicates(out.keys.col(j))) {
      ++attempt;
      ++out.regenerations;
      column_seed = derive_seed(column_seed, attempt);
      fill_normal(out.keys.col(j), column_seed);
    }
  }
  return out;
}

std::vector<std::uint8_t> above_median_indicators(const Dataset& data, const TieKeyMatrix& keys,
                                                  int j) {
  const int n = data.n();
  if (keys.keys.rows() != n || keys.keys.cols() != data.p()) {
    throw ValidationError("tie keys do not conform to the dataset shape");
  }
  if (j < 0 || j >= data.p()) throw ValidationError("column index out of range");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Ascending in (value, key); equal values are ties and defer to the key.
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double xa = data(a, j);
    const double xb = data(b, j);
    if (xa != xb) return xa < xb;
    return keys.keys(a, j) < keys.keys(b, j);
  });

  std::vector<std::uint8_t> indicators(n, 0);
  const int half = half_count(n);
  for (int r = n - half; r < n; ++r) indicators[order[r]] = 1;
  return indicators;
}

int QuadrantCountSet::at(int j, int jp) const {
  return counts.at(pair_offset(j, jp, p)).t;
}

QuadrantCountSet quadrant_counts(const Dataset& data, const TieKeyMatrix& keys) {
  QuadrantCountSet out;
  out.n = data.n();
  out.p = data.p();
  out.half_n = half_count(out.n);

  std::vector<std::vector<std::uint8_t>> above;
  above.reserve(out.p);
  for (int j = 0; j < out.p; ++j) above.push_back(above_median_indicators(data, keys, j));

  out.counts.reserve(pair_count(out.p));
  for (const auto& [j, jp] : all_pairs(out.p)) {
    int t = 0;
    for (int i = 0; i < out.n; ++i) t += above[j][i] & above[jp][i];
    out.counts.push_back({j, jp, t});
  }
  return out;
}

Sensitivity sensitivity(int p) {
  if (p < 2) throw ValidationError("sensitivity: need p >= 2");
  return {1, static_cast<long long>(pair_count(p))};
}

}  // namespace dpcopula

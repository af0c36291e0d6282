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

// Integer-count privacy mechanisms.
//
//   geometric  count + two-sided geometric noise, Pr(k) = (1-a)/(1+a) a^|k|,
//              a = exp(-epsilon / delta). Unbounded output.
//   tgm        geometric output clamped into [L, U]. Large spikes at L and U
//              when epsilon is small.
//   btgm       posterior mean of the count given the geometric output under a
//              uniform prior on [L, U]. Real valued, most concentrated of the
//              three range-preserving variants; preferred for the MLE path.
//   rgm        double-geometric noise truncated to [L, U] and renormalized,
//              run at a recalibrated epsilon' < epsilon. No boundary spikes but
//              wider for moderate epsilon.
//
// When epsilon is large enough that the raw geometric output rarely leaves
// [L, U], all three range-preserving mechanisms are practically identical.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dpcopula/core.hpp"
#include "dpcopula/quadrant_stats.hpp"

namespace dpcopula {

enum class Mechanism { kGeometric, kTgm, kBtgm, kRgm };

std::string_view to_string(Mechanism m);
Mechanism parse_mechanism(std::string_view name);
bool is_range_preserving(Mechanism m);

struct PrivacyBudget {
  double epsilon_total = 0.0;
  int p = 0;
  double epsilon_pair = 0.0;
  double delta = 1.0;  // per-query l1 sensitivity

  // Even split of epsilon_total over the p(p-1)/2 pair queries.
  static PrivacyBudget split(double epsilon_total, int p, double delta = 1.0);
};

struct BoundedCountQuery {
  long long true_count = 0;
  long long lower = 0;
  long long upper = 0;

  BoundedCountQuery(long long true_count, long long lower, long long upper);
};

// a = exp(-epsilon / delta)
double geometric_alpha(double epsilon, double delta);

double double_geometric_log_pmf(long long k, double epsilon, double delta);

// Exact draw: difference of two iid Geometric(1 - a) failure counts.
long long sample_double_geometric(double epsilon, double delta, Rng& rng);

long long geometric_noise(long long count, double epsilon, double delta, Rng& rng);

long long tgm(const BoundedCountQuery& query, double epsilon, double delta, Rng& rng);

// Closed-form E[M | m] under a uniform prior on {L..U}.
double btgm_posterior_mean(long long m, long long lower, long long upper, double alpha);

double btgm(const BoundedCountQuery& query, double epsilon, double delta, Rng& rng);

// g(epsilon') from the renormalized mechanism's calibration equation.
double rgm_g(double epsilon_prime, long long lower, long long upper, double delta);

// Solves epsilon' + log g(epsilon') = epsilon by bisection on (0, epsilon].
double rgm_effective_epsilon(long long lower, long long upper, double epsilon, double delta);

long long rgm(const BoundedCountQuery& query, double epsilon, double delta, Rng& rng);

// Output PMFs over {L..U} (index s - L) for the integer range-preserving
// mechanisms.
std::vector<double> tgm_pmf(const BoundedCountQuery& query, double epsilon, double delta);
std::vector<double> rgm_pmf(const BoundedCountQuery& query, double epsilon, double delta);

// Output distribution of btgm as (value, probability) atoms with equal values
// merged.
std::vector<std::pair<double, double>> btgm_output_distribution(const BoundedCountQuery& query,
                                                                double epsilon, double delta);

// Exhaustive max over |M - M'| <= delta (M, M' in [L, U]) and all outputs s of
// log Pr(s | M) - log Pr(s | M'). Geometric is answered analytically.
// delta must be a positive integer for the enumeration.
double verify_dp_ratio(Mechanism mechanism, long long lower, long long upper, double delta,
                       double epsilon);

struct NoisyPairCount {
  int j = 0;
  int jp = 0;
  double value = 0.0;
};

struct NoisyCountSet {
  int n = 0;
  int p = 0;
  int half_n = 0;
  Mechanism mechanism = Mechanism::kGeometric;
  PrivacyBudget budget;
  std::optional<std::pair<long long, long long>> bounds;  // range-preserving only
  std::vector<NoisyPairCount> noisy;                      // canonical pair order

  double at(int j, int jp) const;
};

struct PrivatizeOptions {
  bool round_btgm = false;  // release btgm outputs rounded to the nearest integer
};

// Applies the mechanism to each pair with the per-pair budget, in canonical
// pair order from a single stream.
NoisyCountSet privatize_counts(const QuadrantCountSet& counts, const PrivacyBudget& budget,
                               Mechanism mechanism, Rng& rng, PrivatizeOptions options = {});

}  // namespace dpcopula

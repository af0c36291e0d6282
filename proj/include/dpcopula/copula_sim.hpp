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

// Synthetic Gaussian-copula data for simulation studies.

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpcopula/correlation.hpp"
#include "dpcopula/quadrant_stats.hpp"

namespace dpcopula {

class MarginalSpec {
 public:
  enum class Family { kNormal, kGamma, kExponential, kBeta, kStudentT, kDiscrete };

  static MarginalSpec normal(double mean, double sd);
  static MarginalSpec gamma(double shape, double rate);
  static MarginalSpec exponential(double rate);
  static MarginalSpec beta(double a, double b);
  static MarginalSpec student_t(double df);
  static MarginalSpec discrete(std::vector<double> values, std::vector<double> probabilities);

  // "normal(0,1)", "gamma(2,1)", "exponential(1)", "beta(2,5)", "student_t(5)",
  // "discrete(1:0.3, 2:0.3, 3:0.4)". Whitespace is ignored.
  static MarginalSpec parse(std::string_view text);

  Family family() const { return family_; }
  std::string to_string() const;

  double cdf(double x) const;
  // Generalized inverse inf{x : F(x) >= u}. upper_tail = 1 - u is passed
  // separately so values near u = 1 keep full precision.
  double quantile(double u, double upper_tail) const;

 private:
  Family family_ = Family::kNormal;
  std::vector<double> params_;
  std::vector<double> values_;
  std::vector<double> probabilities_;
};

// Scaled Wishart(p + 1, I) draw via the Bartlett decomposition.
CorrelationMatrix random_correlation(int p, Rng& rng);

struct CopulaSampleInfo {
  bool jitter_used = false;      // 1e-12 ridge added before Cholesky
  bool eigen_fallback = false;   // eigenvalue-floored square root used
};

// X_j = F_j^{-1}(Phi(Z_j)), Z ~ N_p(0, R).
Dataset sample_copula(const CorrelationMatrix& correlation, std::span<const MarginalSpec> marginals,
                      int n, Rng& rng, CopulaSampleInfo* info = nullptr);

// Exact noncentral hypergeometric PMF by direct normalization of
// C(h, t)^2 odds^t in extended precision. Oracle for small h only (h <= 20).
std::vector<long double> brute_force_count_distribution(int half_n, double r);

}  // namespace dpcopula

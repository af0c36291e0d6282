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

// Distribution of the quadrant count given a latent Gaussian correlation.
//
// With both margins fixed at h = half_n, the count T follows a noncentral
// hypergeometric law
//
//   Pr(T = t | r) ∝ C(h, t)^2 exp(t * eta(r)),
//   eta(r) = 2 log((pi + 2 asin r) / (pi - 2 asin r)),
//
// a one-parameter exponential family in eta. Everything is evaluated in log
// space from a log-binomial table, since C(h, t)^2 odds^t overflows doubles
// for h in the low hundreds.

#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dpcopula/dp_mechanisms.hpp"

namespace dpcopula {

class CorrelationMatrix;

// Correlations are clamped to +-(1 - kCorrelationClamp) before evaluating
// asin/eta, which are singular at |r| = 1.
inline constexpr double kCorrelationClamp = 1e-9;

double clamp_correlation(double r);

struct CellProbabilities {
  double p11 = 0.25;
  double p10 = 0.25;
  double p01 = 0.25;
  double p00 = 0.25;
};

CellProbabilities cell_probs(double r);

// Natural parameter eta(r); throws for |r| >= 1.
double log_odds_ratio(double r);

// 2 log C(h, t) for t = 0..h.
class LogBinomialTable {
 public:
  explicit LogBinomialTable(int half_n);

  int half_n() const { return half_n_; }
  double operator[](int t) const { return values_[static_cast<std::size_t>(t)]; }
  std::span<const double> values() const { return values_; }

 private:
  int half_n_;
  std::vector<double> values_;
};

// Count distribution at a fixed correlation. The full log-PMF vector is
// computed once at construction and reused by every query.
class PairModel {
 public:
  PairModel(int half_n, double r);
  PairModel(std::shared_ptr<const LogBinomialTable> table, double r);

  int half_n() const { return table_->half_n(); }
  double r() const { return r_; }  // after clamping
  double eta() const { return eta_; }
  double log_normalizer() const { return log_normalizer_; }

  double log_pmf(int t) const;
  std::span<const double> log_pmf_table() const { return log_pmf_; }
  double expected() const;

  // log sum_t Pr_geom(t_noisy | t) Pr(T = t | r). t_noisy may lie outside
  // [0, h]; non-integer values are accepted and use |t_noisy - t| as is.
  double log_marginal_likelihood(double t_noisy, double epsilon_pair, double delta = 1.0) const;

 private:
  void build();

  std::shared_ptr<const LogBinomialTable> table_;
  double r_;
  double eta_ = 0.0;
  double log_normalizer_ = 0.0;
  std::vector<double> log_pmf_;
};

// Marginal likelihood of one geometric-noised count as a function of r.
// The noise kernel log Pr(t_noisy | t) is precomputed, so repeated evaluation
// at new r allocates nothing. This is the sampler hot path: both sums are over
// log-concave terms, so only terms within e^-50 of the largest are visited.
class NoisyPairLikelihood {
 public:
  NoisyPairLikelihood(std::shared_ptr<const LogBinomialTable> table, double t_noisy,
                      double epsilon_pair, double delta = 1.0);

  double operator()(double r) const;
  int half_n() const { return table_->half_n(); }

 private:
  std::shared_ptr<const LogBinomialTable> table_;
  std::vector<double> log_kernel_;
};

// Sum of pairwise marginal log-likelihoods (composite likelihood) for a
// geometric-mechanism NoisyCountSet.
class CompositeLikelihood {
 public:
  explicit CompositeLikelihood(const NoisyCountSet& noisy);

  int p() const { return p_; }
  double operator()(const Eigen::MatrixXd& correlation) const;
  double operator()(const CorrelationMatrix& correlation) const;

 private:
  int p_;
  std::vector<PairIndex> pairs_;
  std::vector<NoisyPairLikelihood> terms_;
};

double log_composite_likelihood(const CorrelationMatrix& correlation, const NoisyCountSet& noisy);

}  // namespace dpcopula

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

// Correlation estimators built on privatized quadrant counts.
//
// Everything here except li_kendall_baseline consumes a NoisyCountSet only;
// raw data never reaches these functions, so their outputs inherit the
// privacy guarantee of the counts by post-processing.

#pragma once

#include <span>
#include <vector>

#include "dpcopula/correlation.hpp"
#include "dpcopula/dp_mechanisms.hpp"
#include "dpcopula/posterior_sampler.hpp"
#include "dpcopula/quadrant_stats.hpp"

namespace dpcopula {

// Solves E[T | r] = t_noisy by bisection. Returns -1 / +1 exactly at the
// boundary counts 0 / half_n. Throws for t_noisy outside [0, half_n].
double mle_pair(double t_noisy, int half_n);

struct MleEstimate {
  CorrelationMatrix estimate;
  Eigen::MatrixXd pairwise;  // before projection
  bool was_psd = true;
  double frobenius_adjustment = 0.0;
};

// Pairwise MLEs assembled and projected onto the nearest correlation matrix.
// Requires a range-preserving mechanism.
MleEstimate mle_matrix(const NoisyCountSet& noisy);

struct PairInterval {
  int j = 0;
  int jp = 0;
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct IntervalSummary {
  std::vector<PairInterval> pairs;  // canonical order
  double alpha = 0.05;
};

struct PosteriorDraws {
  std::vector<CorrelationMatrix> draws;
  int burn_in = 0;
  MhDiagnostics diagnostics;
};

struct BayesEstimate {
  CorrelationMatrix point;  // posterior mean
  IntervalSummary intervals;
  PosteriorDraws posterior;
  bool mean_projected = false;  // Monte Carlo mean fell outside the PSD cone
};

// Type-7 sample quantile (linear interpolation of order statistics).
double quantile_type7(std::span<const double> values, double prob);

// Exact p = 2 posterior on a midpoint grid of grid_size cells over (-1, 1)
// with a uniform prior. Quantiles invert the piecewise-linear CDF; draws are
// n_draws resamples of grid points.
BayesEstimate bayes_grid_p2(double t_noisy, int half_n, double epsilon_pair, int grid_size,
                            double alpha, Rng& rng, int n_draws = 1000, double delta = 1.0);

struct BayesMhOptions {
  MhOptions sampler;
  double alpha = 0.05;
  bool use_likelihood = true;  // false: prior-only run
};

// LKJ(1) prior times composite likelihood, sampled with adaptive RWM.
// Geometric-mechanism counts only.
BayesEstimate bayes_mh(const NoisyCountSet& noisy, const BayesMhOptions& options, Rng& rng);

// Summaries shared by both Bayesian paths.
IntervalSummary summarize_draws(std::span<const CorrelationMatrix> draws, double alpha);

// Kendall tau-a.
double kendall_tau(std::span<const double> x, std::span<const double> y);

// Pairwise Kendall tau + Laplace noise with scale (4/n) / epsilon_pair,
// mapped by sin(pi tau / 2), clamped and projected. Consumes raw data and
// spends its own budget epsilon_total.
CorrelationMatrix li_kendall_baseline(const Dataset& data, double epsilon_total, Rng& rng);

struct CoefficientSummary {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  int used_draws = 0;
  int degenerate_draws = 0;  // |R(pred, ctl)| == 1, skipped
};

// beta = (R[t,pred] - R[t,ctl] R[pred,ctl]) / (1 - R[pred,ctl]^2) per draw.
CoefficientSummary conditional_regression_coef(const PosteriorDraws& draws, int target,
                                               int predictor, int control, double alpha = 0.05);

}  // namespace dpcopula

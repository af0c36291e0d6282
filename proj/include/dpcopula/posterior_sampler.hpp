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

// Adaptive random-walk Metropolis over correlation matrices.
//
// A p x p correlation matrix is parameterized by its p(p-1)/2 canonical
// partial correlations z = tanh(y), y unconstrained, filled into the Cholesky
// factor row by row:
//
//   L[i][0] = z(0,i)
//   L[i][k] = z(k,i) * sqrt(1 - sum_{m<k} L[i][m]^2)     0 < k < i
//   L[i][i] = sqrt(1 - sum_{m<i} L[i][m]^2)
//
// Under LKJ(1) (uniform over correlation matrices) the partial correlation
// z(k,i) has density proportional to (1 - z^2)^((p - 2 - k) / 2), and
// dz/dy = 1 - z^2, so the prior in y-space is
//
//   log pi(y) = sum_{k<i} ((p - 2 - k) / 2 + 1) log(1 - tanh(y(k,i))^2).
//
// Proposal: y' = y + lambda * s .* xi, xi ~ N(0, I). During burn-in s tracks
// the running standard deviation of each coordinate and log(lambda) follows a
// Robbins-Monro recursion toward the target acceptance rate. Both are frozen
// after burn-in so the retained draws come from a fixed Markov kernel.

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpcopula/core.hpp"

namespace dpcopula {

int unconstrained_dimension(int p);

// Builds R from unconstrained coordinates (canonical pair order). When
// log_prior is non-null it receives the LKJ(1) log density in y-space
// (including the tanh Jacobian), up to a constant.
Eigen::MatrixXd correlation_from_unconstrained(const Eigen::VectorXd& y, int p,
                                               double* log_prior = nullptr);

// Inverse map; requires a positive definite R.
Eigen::VectorXd unconstrained_from_correlation(const Eigen::MatrixXd& correlation);

struct MhOptions {
  int n_samples = 4000;
  int burn_in = 4000;
  int thin = 1;
  double target_acceptance = 0.234;
  double min_acceptance = 0.05;  // diagnostic band after adaptation
  double max_acceptance = 0.95;
};

struct MhDiagnostics {
  double acceptance_rate = 0.0;  // post burn-in
  double proposal_scale = 0.0;   // frozen lambda
  std::vector<double> ess;       // per pair, canonical order
  bool flagged = false;
  std::string message;
};

struct MhChain {
  std::vector<Eigen::MatrixXd> draws;
  MhDiagnostics diagnostics;
};

using CorrelationLogLikelihood = std::function<double(const Eigen::MatrixXd&)>;

// Runs one chain targeting LKJ(1) x exp(log_likelihood). Pass an empty
// function for a prior-only run. `initial` (optional) must be positive
// definite.
MhChain sample_correlation_mh(int p, const CorrelationLogLikelihood& log_likelihood,
                              const MhOptions& options, Rng& rng,
                              const Eigen::MatrixXd* initial = nullptr);

// Effective sample size via Geyer's initial positive sequence.
double effective_sample_size(std::span<const double> series);

}  // namespace dpcopula

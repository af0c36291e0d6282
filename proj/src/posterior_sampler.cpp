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

#include "dpcopula/posterior_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace dpcopula {
namespace {

// log(1 - tanh(y)^2) = -2 log cosh(y), stable for large |y|.
double log_one_minus_tanh_sq(double y) {
  const double a = std::abs(y);
  return -2.0 * (a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2);
}

struct Welford {
  explicit Welford(int d) : mean(Eigen::VectorXd::Zero(d)), m2(Eigen::VectorXd::Zero(d)) {}
  void add(const Eigen::VectorXd& x) {
    ++count;
    const Eigen::VectorXd diff = x - mean;
    mean += diff / static_cast<double>(count);
    m2 += diff.cwiseProduct(x - mean);
  }
  Eigen::VectorXd sd() const { return (m2 / static_cast<double>(count - 1)).cwiseSqrt(); }

  long count = 0;
  Eigen::VectorXd mean;
  Eigen::VectorXd m2;
};

}  // namespace

int unconstrained_dimension(int p) { return static_cast<int>(pair_count(p)); }

Eigen::MatrixXd correlation_from_unconstrained(const Eigen::VectorXd& y, int p,
                                               double* log_prior) {
  if (p < 2 || y.size() != unconstrained_dimension(p)) {
    throw ValidationError("unconstrained vector has the wrong length");
  }
  Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(p, p);
  chol(0, 0) = 1.0;
  double lp = 0.0;
  for (int i = 1; i < p; ++i) {
    double used = 0.0;
    for (int k = 0; k < i; ++k) {
      const double yk = y(static_cast<Eigen::Index>(pair_offset(k, i, p)));
      const double z = std::tanh(yk);
      lp += (0.5 * (p - 2 - k) + 1.0) * log_one_minus_tanh_sq(yk);
      const double v = z * std::sqrt(std::max(0.0, 1.0 - used));
      chol(i, k) = v;
      used += v * v;
    }
    chol(i, i) = std::sqrt(std::max(0.0, 1.0 - used));
  }
  if (log_prior) *log_prior = lp;
  Eigen::MatrixXd r = chol * chol.transpose();
  r = 0.5 * (r + r.transpose()).eval();
  r.diagonal().setOnes();
  return r;
}

Eigen::VectorXd unconstrained_from_correlation(const Eigen::MatrixXd& correlation) {
  const auto p = static_cast<int>(correlation.rows());
  Eigen::LLT<Eigen::MatrixXd> llt(correlation);
  if (llt.info() != Eigen::Success) {
    throw ValidationError("unconstrained_from_correlation: matrix is not positive definite");
  }
  const Eigen::MatrixXd chol = llt.matrixL();
  Eigen::VectorXd y(unconstrained_dimension(p));
  constexpr double kEdge = 1.0 - 1e-12;
  for (int i = 1; i < p; ++i) {
    double used = 0.0;
    for (int k = 0; k < i; ++k) {
      const double rest = std::sqrt(std::max(1e-300, 1.0 - used));
      const double z = std::clamp(chol(i, k) / rest, -kEdge, kEdge);
      y(static_cast<Eigen::Index>(pair_offset(k, i, p))) = std::atanh(z);
      used += chol(i, k) * chol(i, k);
    }
  }
  return y;
}

double effective_sample_size(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 4) return static_cast<double>(n);
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) s += (series[t] - mean) * (series[t + lag] - mean);
    return s / static_cast<double>(n);
  };
  const double gamma0 = autocov(0);
  if (!(gamma0 > 0.0)) return static_cast<double>(n);

  // Geyer: sum consecutive-pair autocovariances while positive, monotone.
  double sum = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    double pair = autocov(2 * m) + autocov(2 * m + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, prev);
    sum += pair;
    prev = pair;
  }
  const double tau = (-gamma0 + 2.0 * sum) / gamma0;
  return static_cast<double>(n) / std::max(tau, 1e-12);
}

MhChain sample_correlation_mh(int p, const CorrelationLogLikelihood& log_likelihood,
                              const MhOptions& options, Rng& rng,
                              const Eigen::MatrixXd* initial) {
  if (p < 2) throw ValidationError("sampler: need p >= 2");
  if (options.n_samples < 1 || options.burn_in < 0 || options.thin < 1) {
    throw ValidationError("sampler: need n_samples >= 1, burn_in >= 0, thin >= 1");
  }
  const int d = unconstrained_dimension(p);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto log_target = [&](const Eigen::VectorXd& y, Eigen::MatrixXd& r) {
    double lp = 0.0;
    r = correlation_from_unconstrained(y, p, &lp);
    if (log_likelihood) lp += log_likelihood(r);
    return std::isnan(lp) ? -std::numeric_limits<double>::infinity() : lp;
  };

  Eigen::VectorXd y = initial ? unconstrained_from_correlation(*initial) : Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd r;
  double current = log_target(y, r);

  Eigen::VectorXd shape = Eigen::VectorXd::Constant(d, 0.1);
  double log_lambda = std::log(2.38 / std::sqrt(static_cast<double>(d)));
  Welford moments(d);
  const int moments_start = options.burn_in / 4;

  Eigen::VectorXd xi(d);
  Eigen::VectorXd proposal(d);
  Eigen::MatrixXd r_proposal;
  auto step = [&](bool adapt, long iteration) {
    const double lambda = std::exp(log_lambda);
    for (int k = 0; k < d; ++k) xi(k) = normal(rng);
    proposal = y + lambda * shape.cwiseProduct(xi);
    const double candidate = log_target(proposal, r_proposal);
    const double accept_prob =
        candidate >= current ? 1.0 : std::exp(candidate - current);  // 0 for -inf
    const bool accepted = unif(rng) < accept_prob;
    if (accepted) {
      y = proposal;
      r.swap(r_proposal);
      current = candidate;
    }
    if (adapt) {
      const double gain = std::pow(static_cast<double>(iteration + 1), -0.6);
      log_lambda += gain * (accept_prob - options.target_acceptance);
      if (iteration >= moments_start) {
        moments.add(y);
        if (moments.count >= 100 && moments.count % 50 == 0) {
          shape = moments.sd().cwiseMax(1e-4);
        }
      }
    }
    return accepted;
  };

  for (long it = 0; it < options.burn_in; ++it) step(true, it);

  MhChain chain;
  chain.draws.reserve(static_cast<std::size_t>(options.n_samples));
  long accepted = 0;
  const long total = static_cast<long>(options.n_samples) * options.thin;
  for (long it = 0; it < total; ++it) {
    accepted += step(false, it) ? 1 : 0;
    if ((it + 1) % options.thin == 0) chain.draws.push_back(r);
  }

  auto& diag = chain.diagnostics;
  diag.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(total);
  diag.proposal_scale = std::exp(log_lambda);
  for (const auto& [j, jp] : all_pairs(p)) {
    std::vector<double> series;
    series.reserve(chain.draws.size());
    for (const auto& draw : chain.draws) series.push_back(draw(j, jp));
    diag.ess.push_back(effective_sample_size(series));
  }
  if (diag.acceptance_rate < options.min_acceptance ||
      diag.acceptance_rate > options.max_acceptance) {
    diag.flagged = true;
    std::ostringstream msg;
    msg << "acceptance rate " << diag.acceptance_rate << " outside [" << options.min_acceptance
        << ", " << options.max_acceptance << "] after adaptation";
    diag.message = msg.str();
  }
  return chain;
}

}  // namespace dpcopula

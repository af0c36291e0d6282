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

#include "dpcopula/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "dpcopula/pair_likelihood.hpp"

namespace dpcopula {
namespace {

constexpr double kMleTolerance = 1e-8;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
}

CorrelationMatrix mean_of(std::span<const CorrelationMatrix> draws, bool* projected) {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(draws.front().dim(), draws.front().dim());
  for (const auto& d : draws) sum += d.matrix();
  sum /= static_cast<double>(draws.size());
  sum.diagonal().setOnes();
  *projected = false;
  if (min_eigenvalue(sum) < -kPsdTolerance) {
    *projected = true;
    return CorrelationMatrix(nearest_correlation(sum).matrix);
  }
  return CorrelationMatrix(sum);
}

// Positive definite starting point from the noisy counts: pairwise MLEs of the
// counts clipped into range, projected, then pulled slightly toward I.
Eigen::MatrixXd starting_point(const NoisyCountSet& noisy) {
  const int p = noisy.p;
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(p, p);
  for (const auto& c : noisy.noisy) {
    const double clipped = std::clamp(c.value, 0.0, static_cast<double>(noisy.half_n));
    const double r = mle_pair(clipped, noisy.half_n);
    m(c.j, c.jp) = m(c.jp, c.j) = r;
  }
  Eigen::MatrixXd projected = nearest_correlation(m).matrix;
  return 0.9 * projected + 0.1 * Eigen::MatrixXd::Identity(p, p);
}

}  // namespace

double mle_pair(double t_noisy, int half_n) {
  if (half_n < 1) throw ValidationError("mle_pair: half_n must be positive");
  if (!(t_noisy >= 0.0 && t_noisy <= half_n)) {
    throw ValidationError(
        "mle_pair: noisy count outside [0, half_n]; the estimating equation has no solution "
        "(use a range-preserving mechanism)");
  }
  if (t_noisy == 0.0) return -1.0;
  if (t_noisy == static_cast<double>(half_n)) return 1.0;

  auto table = std::make_shared<const LogBinomialTable>(half_n);
  double lo = -(1.0 - kCorrelationClamp);
  double hi = 1.0 - kCorrelationClamp;
  double mid = 0.0;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double gap = PairModel(table, mid).expected() - t_noisy;
    if (std::abs(gap) <= kMleTolerance) break;
    if (gap < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-15) break;
  }
  return mid;
}

MleEstimate mle_matrix(const NoisyCountSet& noisy) {
  if (!is_range_preserving(noisy.mechanism)) {
    throw ValidationError(
        "MLE needs counts from a range-preserving mechanism (tgm, btgm or rgm); "
        "geometric counts can fall outside [0, half_n]");
  }
  const int p = noisy.p;
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(p, p);
  for (const auto& c : noisy.noisy) {
    const double r = mle_pair(c.value, noisy.half_n);
    m(c.j, c.jp) = m(c.jp, c.j) = r;
  }
  ProjectionResult proj = nearest_correlation(m);
  return MleEstimate{CorrelationMatrix(proj.matrix), m, proj.was_psd, proj.frobenius_adjustment};
}

double quantile_type7(std::span<const double> values, double prob) {
  if (values.empty()) throw ValidationError("quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw ValidationError("quantile probability outside [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

IntervalSummary summarize_draws(std::span<const CorrelationMatrix> draws, double alpha) {
  check_alpha(alpha);
  if (draws.empty()) throw ValidationError("no posterior draws to summarize");
  IntervalSummary out;
  out.alpha = alpha;
  std::vector<double> series(draws.size());
  for (const auto& [j, jp] : all_pairs(draws.front().dim())) {
    double sum = 0.0;
    for (std::size_t s = 0; s < draws.size(); ++s) {
      series[s] = draws[s](j, jp);
      sum += series[s];
    }
    out.pairs.push_back({j, jp, sum / static_cast<double>(draws.size()),
                         quantile_type7(series, alpha / 2.0),
                         quantile_type7(series, 1.0 - alpha / 2.0)});
  }
  return out;
}

BayesEstimate bayes_grid_p2(double t_noisy, int half_n, double epsilon_pair, int grid_size,
                            double alpha, Rng& rng, int n_draws, double delta) {
  if (grid_size < 3) throw ValidationError("grid posterior needs grid_size >= 3");
  if (n_draws < 1) throw ValidationError("grid posterior needs at least one draw");
  check_alpha(alpha);

  const NoisyPairLikelihood likelihood(std::make_shared<const LogBinomialTable>(half_n), t_noisy,
                                       epsilon_pair, delta);
  const double width = 2.0 / grid_size;
  std::vector<double> grid(grid_size), weight(grid_size);
  double max_log = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_size; ++i) {
    grid[i] = -1.0 + (i + 0.5) * width;
    weight[i] = likelihood(grid[i]);
    max_log = std::max(max_log, weight[i]);
  }
  double total = 0.0;
  for (double& w : weight) {
    w = std::exp(w - max_log);
    total += w;
  }
  double mean = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    weight[i] /= total;
    mean += weight[i] * grid[i];
  }

  // Mass of cell i is spread uniformly over [edge_i, edge_i + width].
  std::vector<double> cdf(grid_size + 1, 0.0);
  for (int i = 0; i < grid_size; ++i) cdf[i + 1] = cdf[i] + weight[i];
  auto quantile = [&](double q) {
    const auto it = std::upper_bound(cdf.begin() + 1, cdf.end(), q);
    const auto i = std::min<std::ptrdiff_t>(std::distance(cdf.begin() + 1, it), grid_size - 1);
    const double frac = weight[i] > 0.0 ? (q - cdf[i]) / weight[i] : 0.0;
    return -1.0 + (static_cast<double>(i) + std::clamp(frac, 0.0, 1.0)) * width;
  };

  std::vector<CorrelationMatrix> draws;
  draws.reserve(static_cast<std::size_t>(n_draws));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int s = 0; s < n_draws; ++s) {
    const double u = unif(rng);
    const auto it = std::upper_bound(cdf.begin() + 1, cdf.end(), u);
    const auto i = std::min<std::ptrdiff_t>(std::distance(cdf.begin() + 1, it), grid_size - 1);
    Eigen::Matrix2d m;
    m << 1.0, grid[i], grid[i], 1.0;
    draws.emplace_back(m);
  }

  Eigen::Matrix2d point;
  point << 1.0, mean, mean, 1.0;
  IntervalSummary summary;
  summary.alpha = alpha;
  summary.pairs.push_back({0, 1, mean, quantile(alpha / 2.0), quantile(1.0 - alpha / 2.0)});

  PosteriorDraws posterior;
  posterior.draws = std::move(draws);
  posterior.diagnostics.acceptance_rate = 1.0;
  posterior.diagnostics.ess = {static_cast<double>(n_draws)};
  return BayesEstimate{CorrelationMatrix(point), summary, std::move(posterior), false};
}

BayesEstimate bayes_mh(const NoisyCountSet& noisy, const BayesMhOptions& options, Rng& rng) {
  check_alpha(options.alpha);
  CorrelationLogLikelihood log_likelihood;
  Eigen::MatrixXd initial = Eigen::MatrixXd::Identity(noisy.p, noisy.p);
  if (options.use_likelihood) {
    auto composite = std::make_shared<const CompositeLikelihood>(noisy);
    log_likelihood = [composite](const Eigen::MatrixXd& r) { return (*composite)(r); };
    initial = starting_point(noisy);
  }
  MhChain chain = sample_correlation_mh(noisy.p, log_likelihood, options.sampler, rng, &initial);

  PosteriorDraws posterior;
  posterior.burn_in = options.sampler.burn_in;
  posterior.diagnostics = std::move(chain.diagnostics);
  posterior.draws.reserve(chain.draws.size());
  for (auto& d : chain.draws) posterior.draws.emplace_back(std::move(d));

  bool projected = false;
  CorrelationMatrix point = mean_of(posterior.draws, &projected);
  IntervalSummary summary = summarize_draws(posterior.draws, options.alpha);
  return BayesEstimate{std::move(point), std::move(summary), std::move(posterior), projected};
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError("kendall_tau: need two equal-length samples of size >= 2");
  }
  const std::size_t n = x.size();
  long long net = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double dx = x[a] - x[b];
      const double dy = y[a] - y[b];
      const double s = dx * dy;
      net += (s > 0.0) - (s < 0.0);
    }
  }
  return static_cast<double>(net) / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

CorrelationMatrix li_kendall_baseline(const Dataset& data, double epsilon_total, Rng& rng) {
  const PrivacyBudget budget = PrivacyBudget::split(epsilon_total, data.p());
  const double scale = (4.0 / data.n()) / budget.epsilon_pair;
  std::uniform_real_distribution<double> unif(-0.5, 0.5);

  const int p = data.p();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(p, p);
  for (const auto& [j, jp] : all_pairs(p)) {
    const Eigen::VectorXd xj = data.values().col(j);
    const Eigen::VectorXd xk = data.values().col(jp);
    const double tau = kendall_tau({xj.data(), static_cast<std::size_t>(xj.size())},
                                   {xk.data(), static_cast<std::size_t>(xk.size())});
    const double u = unif(rng);
    const double laplace = -scale * std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
    const double noisy_tau = std::clamp(tau + laplace, -1.0, 1.0);
    const double r = std::clamp(std::sin(0.5 * std::numbers::pi * noisy_tau), -1.0, 1.0);
    m(j, jp) = m(jp, j) = r;
  }
  return CorrelationMatrix(nearest_correlation(m).matrix);
}

CoefficientSummary conditional_regression_coef(const PosteriorDraws& draws, int target,
                                               int predictor, int control, double alpha) {
  check_alpha(alpha);
  if (draws.draws.empty()) throw ValidationError("no posterior draws");
  const int p = draws.draws.front().dim();
  for (int idx : {target, predictor, control}) {
    if (idx < 0 || idx >= p) throw ValidationError("variable index out of range");
  }
  if (target == predictor || target == control || predictor == control) {
    throw ValidationError("target, predictor and control must be distinct variables");
  }
  CoefficientSummary out;
  std::vector<double> betas;
  betas.reserve(draws.draws.size());
  for (const auto& r : draws.draws) {
    const double link = r(predictor, control);
    const double denom = 1.0 - link * link;
    if (denom <= 0.0) {
      ++out.degenerate_draws;
      continue;
    }
    betas.push_back((r(target, predictor) - r(target, control) * link) / denom);
  }
  if (betas.empty()) throw DiagnosticError("every draw is degenerate for this control variable");
  out.used_draws = static_cast<int>(betas.size());
  double sum = 0.0;
  for (double b : betas) sum += b;
  out.mean = sum / static_cast<double>(betas.size());
  out.lower = quantile_type7(betas, alpha / 2.0);
  out.upper = quantile_type7(betas, 1.0 - alpha / 2.0);
  return out;
}

}  // namespace dpcopula

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

#include "dpcopula/pair_likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dpcopula/correlation.hpp"

namespace dpcopula {
namespace {

constexpr double kPi = std::numbers::pi;

double eta_unchecked(double r) {
  const double a = std::asin(r);
  return 2.0 * (std::log(kPi + 2.0 * a) - std::log(kPi - 2.0 * a));
}

// log sum_t exp(base[t] + t * eta + extra[t]); extra may be empty.
double log_sum_exp_family(std::span<const double> base, double eta, const double* extra) {
  const std::size_t size = base.size();
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < size; ++t) {
    double v = base[t] + static_cast<double>(t) * eta;
    if (extra) v += extra[t];
    m = std::max(m, v);
  }
  double s = 0.0;
  for (std::size_t t = 0; t < size; ++t) {
    double v = base[t] + static_cast<double>(t) * eta;
    if (extra) v += extra[t];
    s += std::exp(v - m);
  }
  return m + std::log(s);
}

// Same sum for log-concave summands, visiting only terms within kWindow of
// the maximum. Starts at `guess` and climbs to the mode first.
constexpr double kWindow = 50.0;

double log_sum_exp_unimodal(std::span<const double> base, double eta, const double* extra,
                            std::ptrdiff_t guess) {
  const auto last = static_cast<std::ptrdiff_t>(base.size()) - 1;
  auto f = [&](std::ptrdiff_t t) {
    double v = base[t] + static_cast<double>(t) * eta;
    return extra ? v + extra[t] : v;
  };
  std::ptrdiff_t mode = std::clamp<std::ptrdiff_t>(guess, 0, last);
  double top = f(mode);
  while (mode < last && f(mode + 1) > top) top = f(++mode);
  while (mode > 0 && f(mode - 1) > top) top = f(--mode);

  double s = 1.0;
  for (std::ptrdiff_t t = mode + 1; t <= last; ++t) {
    const double d = f(t) - top;
    if (d < -kWindow) break;
    s += std::exp(d);
  }
  for (std::ptrdiff_t t = mode - 1; t >= 0; --t) {
    const double d = f(t) - top;
    if (d < -kWindow) break;
    s += std::exp(d);
  }
  return top + std::log(s);
}

double geometric_log_norm(double rate) {
  return std::log(-std::expm1(-rate)) - std::log1p(std::exp(-rate));
}

void check_epsilon(double epsilon, double delta) {
  if (!(epsilon > 0.0) || !(delta > 0.0)) {
    throw ValidationError("marginal likelihood needs positive epsilon and sensitivity");
  }
}

}  // namespace

double clamp_correlation(double r) {
  constexpr double kMax = 1.0 - kCorrelationClamp;
  return std::clamp(r, -kMax, kMax);
}

CellProbabilities cell_probs(double r) {
  if (!(std::abs(r) <= 1.0)) throw ValidationError("cell_probs: |r| must not exceed 1");
  const double shift = std::asin(r) / (2.0 * kPi);
  CellProbabilities c;
  c.p11 = c.p00 = 0.25 + shift;
  c.p10 = c.p01 = 0.25 - shift;
  return c;
}

double log_odds_ratio(double r) {
  if (!(std::abs(r) < 1.0)) throw ValidationError("log_odds_ratio: need |r| < 1");
  return eta_unchecked(r);
}

LogBinomialTable::LogBinomialTable(int half_n) : half_n_(half_n) {
  if (half_n < 1) throw ValidationError("log-binomial table: half_n must be positive");
  values_.resize(static_cast<std::size_t>(half_n) + 1);
  const double top = std::lgamma(half_n + 1.0);
  for (int t = 0; t <= half_n; ++t) {
    values_[static_cast<std::size_t>(t)] =
        2.0 * (top - std::lgamma(t + 1.0) - std::lgamma(half_n - t + 1.0));
  }
}

PairModel::PairModel(int half_n, double r)
    : PairModel(std::make_shared<const LogBinomialTable>(half_n), r) {}

PairModel::PairModel(std::shared_ptr<const LogBinomialTable> table, double r)
    : table_(std::move(table)), r_(r) {
  if (!table_) throw ValidationError("PairModel: missing log-binomial table");
  if (!(std::abs(r) <= 1.0)) throw ValidationError("PairModel: |r| must not exceed 1");
  r_ = clamp_correlation(r);
  build();
}

void PairModel::build() {
  eta_ = eta_unchecked(r_);
  const auto base = table_->values();
  log_normalizer_ = log_sum_exp_family(base, eta_, nullptr);
  log_pmf_.resize(base.size());
  for (std::size_t t = 0; t < base.size(); ++t) {
    log_pmf_[t] = base[t] + static_cast<double>(t) * eta_ - log_normalizer_;
  }
}

double PairModel::log_pmf(int t) const {
  if (t < 0 || t > half_n()) throw ValidationError("log_pmf: count outside [0, half_n]");
  return log_pmf_[static_cast<std::size_t>(t)];
}

double PairModel::expected() const {
  double e = 0.0;
  for (std::size_t t = 1; t < log_pmf_.size(); ++t) {
    e += static_cast<double>(t) * std::exp(log_pmf_[t]);
  }
  return e;
}

double PairModel::log_marginal_likelihood(double t_noisy, double epsilon_pair, double delta) const {
  check_epsilon(epsilon_pair, delta);
  const double rate = epsilon_pair / delta;
  const double log_norm = geometric_log_norm(rate);
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(log_pmf_.size());
  for (std::size_t t = 0; t < log_pmf_.size(); ++t) {
    terms[t] = log_norm - rate * std::abs(t_noisy - static_cast<double>(t)) + log_pmf_[t];
    m = std::max(m, terms[t]);
  }
  double s = 0.0;
  for (double v : terms) s += std::exp(v - m);
  return m + std::log(s);
}

NoisyPairLikelihood::NoisyPairLikelihood(std::shared_ptr<const LogBinomialTable> table,
                                         double t_noisy, double epsilon_pair, double delta)
    : table_(std::move(table)) {
  if (!table_) throw ValidationError("NoisyPairLikelihood: missing log-binomial table");
  check_epsilon(epsilon_pair, delta);
  if (!std::isfinite(t_noisy)) throw ValidationError("noisy count must be finite");
  const double rate = epsilon_pair / delta;
  const double log_norm = geometric_log_norm(rate);
  log_kernel_.resize(static_cast<std::size_t>(table_->half_n()) + 1);
  for (std::size_t t = 0; t < log_kernel_.size(); ++t) {
    log_kernel_[t] = log_norm - rate * std::abs(t_noisy - static_cast<double>(t));
  }
}

double NoisyPairLikelihood::operator()(double r) const {
  const double eta = eta_unchecked(clamp_correlation(r));
  const auto base = table_->values();
  // Both summands are log-concave in t. The count mode solves
  // ((h - t) / (t + 1))^2 e^eta = 1.
  const double h = static_cast<double>(table_->half_n());
  const double c = std::exp(-0.5 * eta);
  const auto count_mode = static_cast<std::ptrdiff_t>(std::lround((h - c) / (1.0 + c)));
  return log_sum_exp_unimodal(base, eta, log_kernel_.data(), count_mode) -
         log_sum_exp_unimodal(base, eta, nullptr, count_mode);
}

CompositeLikelihood::CompositeLikelihood(const NoisyCountSet& noisy)
    : p_(noisy.p), pairs_(all_pairs(noisy.p)) {
  if (noisy.mechanism != Mechanism::kGeometric) {
    throw ValidationError(
        "the noise-aware likelihood models the unbounded geometric mechanism; got " +
        std::string(to_string(noisy.mechanism)));
  }
  if (noisy.noisy.size() != pairs_.size()) {
    throw ValidationError("noisy count set has the wrong number of pairs");
  }
  auto table = std::make_shared<const LogBinomialTable>(noisy.half_n);
  terms_.reserve(pairs_.size());
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    const auto& entry = noisy.noisy[k];
    if (entry.j != pairs_[k].j || entry.jp != pairs_[k].jp) {
      throw ValidationError("noisy counts are not in canonical pair order");
    }
    terms_.emplace_back(table, entry.value, noisy.budget.epsilon_pair, noisy.budget.delta);
  }
}

double CompositeLikelihood::operator()(const Eigen::MatrixXd& correlation) const {
  if (correlation.rows() != p_ || correlation.cols() != p_) {
    throw ValidationError("composite likelihood: dimension mismatch");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    total += terms_[k](correlation(pairs_[k].j, pairs_[k].jp));
  }
  return total;
}

double CompositeLikelihood::operator()(const CorrelationMatrix& correlation) const {
  return (*this)(correlation.matrix());
}

double log_composite_likelihood(const CorrelationMatrix& correlation, const NoisyCountSet& noisy) {
  return CompositeLikelihood(noisy)(correlation);
}

}  // namespace dpcopula

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

#include "dpcopula/dp_mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dpcopula {
namespace {

void check_privacy_params(double epsilon, double delta) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("epsilon must be positive and finite");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ValidationError("sensitivity must be positive and finite");
  }
}

void check_bounds(long long lower, long long upper) {
  if (lower > upper) throw ValidationError("lower bound exceeds upper bound");
}

// Number of failures before the first success, success probability 1 - a,
// a = exp(-rate): P(G >= k) = a^k.
long long sample_geometric_failures(double rate, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);                 // [0, 1)
  const double tail = -std::log1p(-u) / rate;  // Exp(rate) variate
  return static_cast<long long>(std::floor(tail));
}

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

void require_integral_delta(double delta) {
  if (delta < 1.0 || std::floor(delta) != delta) {
    throw ValidationError("verify_dp_ratio: enumeration needs a positive integer sensitivity");
  }
}

}  // namespace

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::kGeometric: return "geometric";
    case Mechanism::kTgm: return "tgm";
    case Mechanism::kBtgm: return "btgm";
    case Mechanism::kRgm: return "rgm";
  }
  return "unknown";
}

Mechanism parse_mechanism(std::string_view name) {
  if (name == "geometric") return Mechanism::kGeometric;
  if (name == "tgm") return Mechanism::kTgm;
  if (name == "btgm") return Mechanism::kBtgm;
  if (name == "rgm") return Mechanism::kRgm;
  throw ValidationError("unknown mechanism '" + std::string(name) +
                        "' (expected geometric, tgm, btgm or rgm)");
}

bool is_range_preserving(Mechanism m) { return m != Mechanism::kGeometric; }

PrivacyBudget PrivacyBudget::split(double epsilon_total, int p, double delta) {
  check_privacy_params(epsilon_total, delta);
  if (p < 2) throw ValidationError("privacy budget: need p >= 2");
  PrivacyBudget b;
  b.epsilon_total = epsilon_total;
  b.p = p;
  b.delta = delta;
  b.epsilon_pair = epsilon_total / static_cast<double>(pair_count(p));
  return b;
}

BoundedCountQuery::BoundedCountQuery(long long true_count, long long lower, long long upper)
    : true_count(true_count), lower(lower), upper(upper) {
  check_bounds(lower, upper);
  if (true_count < lower || true_count > upper) {
    throw ValidationError("true count lies outside [lower, upper]");
  }
}

double geometric_alpha(double epsilon, double delta) {
  check_privacy_params(epsilon, delta);
  return std::exp(-epsilon / delta);
}

double double_geometric_log_pmf(long long k, double epsilon, double delta) {
  check_privacy_params(epsilon, delta);
  const double rate = epsilon / delta;
  // log((1 - a) / (1 + a)) with a = exp(-rate)
  const double log_norm = std::log(-std::expm1(-rate)) - std::log1p(std::exp(-rate));
  return log_norm - rate * static_cast<double>(k < 0 ? -k : k);
}

long long sample_double_geometric(double epsilon, double delta, Rng& rng) {
  check_privacy_params(epsilon, delta);
  const double rate = epsilon / delta;
  const long long a = sample_geometric_failures(rate, rng);
  const long long b = sample_geometric_failures(rate, rng);
  return a - b;
}

long long geometric_noise(long long count, double epsilon, double delta, Rng& rng) {
  return count + sample_double_geometric(epsilon, delta, rng);
}

long long tgm(const BoundedCountQuery& query, double epsilon, double delta, Rng& rng) {
  const long long m = geometric_noise(query.true_count, epsilon, delta, rng);
  return std::min(query.upper, std::max(query.lower, m));
}

double btgm_posterior_mean(long long m, long long lower, long long upper, double alpha) {
  check_bounds(lower, upper);
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("btgm: alpha must lie in (0, 1)");
  const double a = alpha;
  const double L = static_cast<double>(lower);
  const double w = static_cast<double>(upper - lower);  // U - L
  const double a_w = std::pow(a, w);
  const double a_w1 = a_w * a;                            // a^(U-L+1)

  if (m < lower) {
    return L + a / (1.0 - a) * (1.0 - (w + 1.0) * a_w + w * a_w1) / (1.0 - a_w1);
  }
  if (m > upper) {
    return L + (w - (w + 1.0) * a + a_w1) / ((1.0 - a) * (1.0 - a_w1));
  }
  const double below = static_cast<double>(m - lower);  // m - L
  const double above = static_cast<double>(upper - m);  // U - m
  const double a_lo = std::pow(a, below + 1.0);         // a^(m-L+1)
  const double a_hi = std::pow(a, above + 1.0);         // a^(U+1-m)
  const double num = below * (1.0 - a * a) + a_lo - (w + 1.0) * a_hi + w * a_hi * a;
  const double den = (1.0 - a) * (1.0 + a - a_lo - a_hi);
  return L + num / den;
}

double btgm(const BoundedCountQuery& query, double epsilon, double delta, Rng& rng) {
  // Outside [L, U] the posterior mean equals its value at the nearer bound;
  // clamping keeps those outputs bit-identical to the boundary atoms.
  const long long m = std::clamp(geometric_noise(query.true_count, epsilon, delta, rng),
                                 query.lower, query.upper);
  return btgm_posterior_mean(m, query.lower, query.upper, geometric_alpha(epsilon, delta));
}

double rgm_g(double epsilon_prime, long long lower, long long upper, double delta) {
  check_privacy_params(epsilon_prime, delta);
  check_bounds(lower, upper);
  const long long width = upper - lower;
  const double d = std::min(delta, static_cast<double>((width + 1) / 2));  // ceil(width / 2)
  const double x = epsilon_prime / delta;
  const double a = std::exp(-x);
  const double w = static_cast<double>(width);
  // (1 + a - a^(d+1) - a^(w+1-d)) / (1 - a^(w+1)), rewritten with expm1.
  const double num = -std::expm1(-(d + 1.0) * x) - a * std::expm1(-(w - d) * x);
  const double den = -std::expm1(-(w + 1.0) * x);
  return num / den;
}

double rgm_effective_epsilon(long long lower, long long upper, double epsilon, double delta) {
  check_privacy_params(epsilon, delta);
  check_bounds(lower, upper);
  auto h = [&](double e) { return e + std::log(rgm_g(e, lower, upper, delta)) - epsilon; };
  double hi = epsilon;
  if (h(hi) < 0.0) {
    throw DiagnosticError("rgm: no calibration root in (0, epsilon]");
  }
  double lo = 0.0;  // h(0+) = -epsilon
  while (hi - lo > 1e-12 * std::max(1.0, epsilon)) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> rgm_pmf(const BoundedCountQuery& query, double epsilon, double delta) {
  const double eps_prime = rgm_effective_epsilon(query.lower, query.upper, epsilon, delta);
  const double rate = eps_prime / delta;
  std::vector<double> logw;
  logw.reserve(static_cast<std::size_t>(query.upper - query.lower + 1));
  for (long long s = query.lower; s <= query.upper; ++s) {
    logw.push_back(-rate * static_cast<double>(std::llabs(s - query.true_count)));
  }
  const double lz = log_sum_exp(logw);
  for (double& v : logw) v = std::exp(v - lz);
  return logw;
}

long long rgm(const BoundedCountQuery& query, double epsilon, double delta, Rng& rng) {
  const std::vector<double> pmf = rgm_pmf(query, epsilon, delta);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    acc += pmf[i];
    if (u < acc) return query.lower + static_cast<long long>(i);
  }
  return query.upper;
}

std::vector<double> tgm_pmf(const BoundedCountQuery& query, double epsilon, double delta) {
  const double a = geometric_alpha(epsilon, delta);
  const long long M = query.true_count;
  const auto size = static_cast<std::size_t>(query.upper - query.lower + 1);
  if (size == 1) return {1.0};
  std::vector<double> pmf(size, 0.0);
  const double c = (1.0 - a) / (1.0 + a);
  for (long long s = query.lower + 1; s < query.upper; ++s) {
    pmf[static_cast<std::size_t>(s - query.lower)] =
        c * std::pow(a, static_cast<double>(std::llabs(s - M)));
  }
  // Pr(noise <= -k) = a^k / (1 + a) for k >= 0.
  pmf.front() = std::pow(a, static_cast<double>(M - query.lower)) / (1.0 + a);
  pmf.back() = std::pow(a, static_cast<double>(query.upper - M)) / (1.0 + a);
  return pmf;
}

std::vector<std::pair<double, double>> btgm_output_distribution(const BoundedCountQuery& query,
                                                                double epsilon, double delta) {
  const double a = geometric_alpha(epsilon, delta);
  const long long M = query.true_count;
  const long long L = query.lower;
  const long long U = query.upper;
  const double c = (1.0 - a) / (1.0 + a);

  // Raw outputs below L (above U) share the atom of m = L (m = U).
  std::vector<std::pair<double, double>> atoms;
  for (long long m = L; m <= U; ++m) {
    atoms.emplace_back(btgm_posterior_mean(m, L, U, a),
                       c * std::pow(a, static_cast<double>(std::llabs(m - M))));
  }
  atoms.front().second += std::pow(a, static_cast<double>(M - L + 1)) / (1.0 + a);
  atoms.back().second += std::pow(a, static_cast<double>(U - M + 1)) / (1.0 + a);

  std::sort(atoms.begin(), atoms.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& atom : atoms) {
    if (!merged.empty() &&
        std::abs(atom.first - merged.back().first) <= 1e-12 * std::max(1.0, std::abs(atom.first))) {
      merged.back().second += atom.second;
    } else {
      merged.push_back(atom);
    }
  }
  return merged;
}

double verify_dp_ratio(Mechanism mechanism, long long lower, long long upper, double delta,
                       double epsilon) {
  check_privacy_params(epsilon, delta);
  check_bounds(lower, upper);
  if (mechanism == Mechanism::kGeometric) {
    // log Pr(M + k = s) - log Pr(M' + k = s) = (epsilon / delta)(|s - M'| - |s - M|),
    // maximized at |M - M'| = delta.
    return epsilon;
  }
  require_integral_delta(delta);
  const auto step = static_cast<long long>(delta);

  // Per-M output log-probabilities, indexed identically across M.
  std::vector<std::vector<double>> logp;
  for (long long M = lower; M <= upper; ++M) {
    const BoundedCountQuery q(M, lower, upper);
    std::vector<double> probs;
    switch (mechanism) {
      case Mechanism::kTgm: probs = tgm_pmf(q, epsilon, delta); break;
      case Mechanism::kRgm: probs = rgm_pmf(q, epsilon, delta); break;
      case Mechanism::kBtgm: {
        // Every M shares the same atom values; only the weights move.
        for (const auto& atom : btgm_output_distribution(q, epsilon, delta)) {
          probs.push_back(atom.second);
        }
        break;
      }
      case Mechanism::kGeometric: break;
    }
    for (double& v : probs) v = std::log(v);
    logp.push_back(std::move(probs));
  }

  double worst = -std::numeric_limits<double>::infinity();
  const auto count = static_cast<long long>(logp.size());
  for (long long i = 0; i < count; ++i) {
    for (long long k = std::max(0LL, i - step); k <= std::min(count - 1, i + step); ++k) {
      if (k == i) continue;
      if (logp[i].size() != logp[k].size()) {
        throw DiagnosticError("verify_dp_ratio: output supports differ between inputs");
      }
      for (std::size_t s = 0; s < logp[i].size(); ++s) {
        worst = std::max(worst, logp[i][s] - logp[k][s]);
      }
    }
  }
  return worst;
}

double NoisyCountSet::at(int j, int jp) const { return noisy.at(pair_offset(j, jp, p)).value; }

NoisyCountSet privatize_counts(const QuadrantCountSet& counts, const PrivacyBudget& budget,
                               Mechanism mechanism, Rng& rng, PrivatizeOptions options) {
  if (budget.p != counts.p) {
    throw ValidationError("privacy budget was split for a different number of variables");
  }
  check_privacy_params(budget.epsilon_pair, budget.delta);

  NoisyCountSet out;
  out.n = counts.n;
  out.p = counts.p;
  out.half_n = counts.half_n;
  out.mechanism = mechanism;
  out.budget = budget;
  if (is_range_preserving(mechanism)) out.bounds = std::make_pair(0LL, 1LL * counts.half_n);

  const double eps = budget.epsilon_pair;
  const double delta = budget.delta;
  out.noisy.reserve(counts.counts.size());
  for (const auto& c : counts.counts) {
    double value = 0.0;
    if (mechanism == Mechanism::kGeometric) {
      value = static_cast<double>(geometric_noise(c.t, eps, delta, rng));
    } else {
      const BoundedCountQuery q(c.t, 0, counts.half_n);
      switch (mechanism) {
        case Mechanism::kTgm: value = static_cast<double>(tgm(q, eps, delta, rng)); break;
        case Mechanism::kRgm: value = static_cast<double>(rgm(q, eps, delta, rng)); break;
        case Mechanism::kBtgm:
          value = btgm(q, eps, delta, rng);
          if (options.round_btgm) value = std::round(value);
          break;
        case Mechanism::kGeometric: break;
      }
    }
    out.noisy.push_back({c.j, c.jp, value});
  }
  return out;
}

}  // namespace dpcopula

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

#include "dpcopula/copula_sim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/exponential.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace dpcopula {
namespace {

namespace bm = boost::math;

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("marginal: " + what);
}

double positive_prob(double u) {
  return std::clamp(u, std::numeric_limits<double>::min(), 1.0);
}

template <class Dist>
double continuous_quantile(const Dist& dist, double u, double upper_tail) {
  if (u <= 0.5) return bm::quantile(dist, positive_prob(u));
  return bm::quantile(bm::complement(dist, positive_prob(upper_tail)));
}

std::vector<double> parse_numbers(std::string_view body) {
  std::vector<double> out;
  std::string item;
  std::istringstream in{std::string(body)};
  while (std::getline(in, item, ',')) {
    std::istringstream cell(item);
    cell.imbue(std::locale::classic());
    double v = 0.0;
    if (!(cell >> v)) throw ValidationError("marginal: cannot parse number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

MarginalSpec MarginalSpec::normal(double mean, double sd) {
  require(std::isfinite(mean) && sd > 0.0, "normal needs finite mean and sd > 0");
  MarginalSpec m;
  m.family_ = Family::kNormal;
  m.params_ = {mean, sd};
  return m;
}

MarginalSpec MarginalSpec::gamma(double shape, double rate) {
  require(shape > 0.0 && rate > 0.0, "gamma needs shape > 0 and rate > 0");
  MarginalSpec m;
  m.family_ = Family::kGamma;
  m.params_ = {shape, rate};
  return m;
}

MarginalSpec MarginalSpec::exponential(double rate) {
  require(rate > 0.0, "exponential needs rate > 0");
  MarginalSpec m;
  m.family_ = Family::kExponential;
  m.params_ = {rate};
  return m;
}

MarginalSpec MarginalSpec::beta(double a, double b) {
  require(a > 0.0 && b > 0.0, "beta needs a > 0 and b > 0");
  MarginalSpec m;
  m.family_ = Family::kBeta;
  m.params_ = {a, b};
  return m;
}

MarginalSpec MarginalSpec::student_t(double df) {
  require(df > 0.0, "student_t needs df > 0");
  MarginalSpec m;
  m.family_ = Family::kStudentT;
  m.params_ = {df};
  return m;
}

MarginalSpec MarginalSpec::discrete(std::vector<double> values, std::vector<double> probabilities) {
  require(!values.empty() && values.size() == probabilities.size(),
          "discrete needs matching, non-empty values and probabilities");
  require(std::is_sorted(values.begin(), values.end()) &&
              std::adjacent_find(values.begin(), values.end()) == values.end(),
          "discrete values must be strictly increasing");
  double total = 0.0;
  for (double q : probabilities) {
    require(q >= 0.0, "discrete probabilities must be non-negative");
    total += q;
  }
  require(std::abs(total - 1.0) < 1e-9, "discrete probabilities must sum to 1");
  MarginalSpec m;
  m.family_ = Family::kDiscrete;
  m.values_ = std::move(values);
  m.probabilities_ = std::move(probabilities);
  return m;
}

MarginalSpec MarginalSpec::parse(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')') {
    throw ValidationError("marginal: expected family(params), got '" + std::string(text) + "'");
  }
  const std::string family = s.substr(0, open);
  const std::string_view body(s.data() + open + 1, s.size() - open - 2);

  if (family == "discrete") {
    std::vector<double> values, probs;
    std::string item;
    std::istringstream in{std::string(body)};
    while (std::getline(in, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        throw ValidationError("marginal: discrete entries are value:probability");
      }
      const auto pair = parse_numbers(item.substr(0, colon) + "," + item.substr(colon + 1));
      values.push_back(pair[0]);
      probs.push_back(pair[1]);
    }
    return discrete(std::move(values), std::move(probs));
  }

  const std::vector<double> v = parse_numbers(body);
  auto arity = [&](std::size_t k) {
    if (v.size() != k) {
      throw ValidationError("marginal: " + family + " takes " + std::to_string(k) + " parameter(s)");
    }
  };
  if (family == "normal") { arity(2); return normal(v[0], v[1]); }
  if (family == "gamma") { arity(2); return gamma(v[0], v[1]); }
  if (family == "exponential") { arity(1); return exponential(v[0]); }
  if (family == "beta") { arity(2); return beta(v[0], v[1]); }
  if (family == "student_t") { arity(1); return student_t(v[0]); }
  throw ValidationError("marginal: unknown family '" + family + "'");
}

std::string MarginalSpec::to_string() const {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(17);
  auto list = [&](const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  };
  switch (family_) {
    case Family::kNormal: out << "normal("; list(params_); break;
    case Family::kGamma: out << "gamma("; list(params_); break;
    case Family::kExponential: out << "exponential("; list(params_); break;
    case Family::kBeta: out << "beta("; list(params_); break;
    case Family::kStudentT: out << "student_t("; list(params_); break;
    case Family::kDiscrete:
      out << "discrete(";
      for (std::size_t i = 0; i < values_.size(); ++i) {
        out << (i ? "," : "") << values_[i] << ":" << probabilities_[i];
      }
      break;
  }
  out << ")";
  return out.str();
}

double MarginalSpec::cdf(double x) const {
  switch (family_) {
    case Family::kNormal: return bm::cdf(bm::normal(params_[0], params_[1]), x);
    case Family::kGamma:
      return x <= 0.0 ? 0.0 : bm::cdf(bm::gamma_distribution<>(params_[0], 1.0 / params_[1]), x);
    case Family::kExponential:
      return x <= 0.0 ? 0.0 : bm::cdf(bm::exponential(params_[0]), x);
    case Family::kBeta:
      return x <= 0.0 ? 0.0 : x >= 1.0 ? 1.0 : bm::cdf(bm::beta_distribution<>(params_[0], params_[1]), x);
    case Family::kStudentT: return bm::cdf(bm::students_t(params_[0]), x);
    case Family::kDiscrete: {
      double acc = 0.0;
      for (std::size_t k = 0; k < values_.size() && values_[k] <= x; ++k) acc += probabilities_[k];
      return std::min(acc, 1.0);
    }
  }
  return 0.0;
}

double MarginalSpec::quantile(double u, double upper_tail) const {
  switch (family_) {
    case Family::kNormal:
      return continuous_quantile(bm::normal(params_[0], params_[1]), u, upper_tail);
    case Family::kGamma:
      return continuous_quantile(bm::gamma_distribution<>(params_[0], 1.0 / params_[1]), u,
                                 upper_tail);
    case Family::kExponential:
      return continuous_quantile(bm::exponential(params_[0]), u, upper_tail);
    case Family::kBeta:
      return continuous_quantile(bm::beta_distribution<>(params_[0], params_[1]), u, upper_tail);
    case Family::kStudentT:
      return continuous_quantile(bm::students_t(params_[0]), u, upper_tail);
    case Family::kDiscrete: {
      double acc = 0.0;
      for (std::size_t k = 0; k < values_.size(); ++k) {
        acc += probabilities_[k];
        if (acc >= u) return values_[k];
      }
      return values_.back();
    }
  }
  return 0.0;
}

CorrelationMatrix random_correlation(int p, Rng& rng) {
  if (p < 2) throw ValidationError("random_correlation: need p >= 2");
  const int df = p + 1;
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    std::chi_squared_distribution<double> chi(static_cast<double>(df - i));
    a(i, i) = std::sqrt(chi(rng));
    for (int j = 0; j < i; ++j) a(i, j) = normal(rng);
  }
  const Eigen::MatrixXd w = a * a.transpose();
  const Eigen::VectorXd inv_sd = w.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd r = inv_sd.asDiagonal() * w * inv_sd.asDiagonal();
  r = 0.5 * (r + r.transpose()).eval();
  r.diagonal().setOnes();
  return CorrelationMatrix(r);
}

Dataset sample_copula(const CorrelationMatrix& correlation, std::span<const MarginalSpec> marginals,
                      int n, Rng& rng, CopulaSampleInfo* info) {
  const int p = correlation.dim();
  if (static_cast<int>(marginals.size()) != p) {
    throw ValidationError("sample_copula: need one marginal per variable");
  }
  if (n < 2) throw ValidationError("sample_copula: need n >= 2");

  CopulaSampleInfo local;
  Eigen::MatrixXd factor;
  Eigen::LLT<Eigen::MatrixXd> llt(correlation.matrix());
  if (llt.info() == Eigen::Success) {
    factor = llt.matrixL();
  } else {
    local.jitter_used = true;
    const Eigen::MatrixXd ridged =
        (correlation.matrix() + 1e-12 * Eigen::MatrixXd::Identity(p, p)) / (1.0 + 1e-12);
    Eigen::LLT<Eigen::MatrixXd> retry(ridged);
    if (retry.info() == Eigen::Success) {
      factor = retry.matrixL();
    } else {
      local.eigen_fallback = true;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(correlation.matrix());
      factor = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }
  }
  if (!factor.allFinite()) throw DiagnosticError("sample_copula: factorization failed");
  if (info) *info = local;

  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd g(p);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < p; ++k) g(k) = normal(rng);
    const Eigen::VectorXd z = factor * g;
    for (int k = 0; k < p; ++k) {
      const double zk = z(k);
      const double lower = 0.5 * std::erfc(-zk / std::numbers::sqrt2);
      const double upper = 0.5 * std::erfc(zk / std::numbers::sqrt2);
      x(i, k) = marginals[k].quantile(lower, upper);
    }
  }
  return Dataset(std::move(x));
}

std::vector<long double> brute_force_count_distribution(int half_n, double r) {
  if (half_n < 1 || half_n > 20) {
    throw ValidationError("brute_force_count_distribution: half_n must lie in [1, 20]");
  }
  if (!(std::abs(r) < 1.0)) throw ValidationError("brute_force_count_distribution: need |r| < 1");
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double a = std::asin(static_cast<long double>(r));
  const long double ratio = (pi + 2.0L * a) / (pi - 2.0L * a);
  const long double odds = ratio * ratio;

  std::vector<long double> w(static_cast<std::size_t>(half_n) + 1);
  long double binom = 1.0L;  // C(h, t), exact in long double for h <= 20
  long double power = 1.0L;
  long double total = 0.0L;
  for (int t = 0; t <= half_n; ++t) {
    if (t > 0) {
      binom = binom * static_cast<long double>(half_n - t + 1) / static_cast<long double>(t);
      power *= odds;
    }
    w[static_cast<std::size_t>(t)] = binom * binom * power;
    total += w[static_cast<std::size_t>(t)];
  }
  for (auto& v : w) v /= total;
  return w;
}

}  // namespace dpcopula

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

#include "dpcopula/eval_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <thread>

#include "dpcopula/copula_sim.hpp"
#include "dpcopula/quadrant_stats.hpp"

namespace dpcopula {
namespace {

// Mean and standard error of the mean, summed in sorted order.
Metric mean_and_se(std::vector<double> values) {
  Metric m;
  if (values.empty()) return m;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  m.value = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.value) * (v - m.value);
    m.std_error = std::sqrt(ss / static_cast<double>(values.size() - 1) /
                            static_cast<double>(values.size()));
  }
  return m;
}

void require_records(std::span<const RunRecord> records) {
  if (records.empty()) throw ValidationError("metrics: no records");
  const int p = records.front().truth.dim();
  for (const auto& r : records) {
    if (r.truth.dim() != p || r.estimate.dim() != p) {
      throw ValidationError("metrics: records disagree on dimension");
    }
  }
}

const PairInterval& interval_at(const RunRecord& record, std::size_t k) {
  if (!record.intervals || record.intervals->pairs.size() != pair_count(record.truth.dim())) {
    throw ValidationError("metrics: record " + std::to_string(record.replicate) +
                          " carries no intervals");
  }
  return record.intervals->pairs[k];
}

bool covers(const PairInterval& iv, double truth) {
  return iv.lower <= truth && truth <= iv.upper;
}

}  // namespace

Metric mae(std::span<const RunRecord> records) {
  require_records(records);
  std::vector<double> per_replicate;
  per_replicate.reserve(records.size());
  for (const auto& rec : records) {
    std::vector<double> errs;
    for (const auto& [j, jp] : all_pairs(rec.truth.dim())) {
      errs.push_back(std::abs(rec.estimate(j, jp) - rec.truth(j, jp)));
    }
    per_replicate.push_back(mean_and_se(std::move(errs)).value);
  }
  return mean_and_se(std::move(per_replicate));
}

CoverageLength coverage_and_length(std::span<const RunRecord> records) {
  require_records(records);
  std::vector<double> cov, len;
  for (const auto& rec : records) {
    const auto pairs = all_pairs(rec.truth.dim());
    std::vector<double> c, l;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto& iv = interval_at(rec, k);
      c.push_back(covers(iv, rec.truth(pairs[k].j, pairs[k].jp)) ? 1.0 : 0.0);
      l.push_back(iv.upper - iv.lower);
    }
    cov.push_back(mean_and_se(std::move(c)).value);
    len.push_back(mean_and_se(std::move(l)).value);
  }
  return {mean_and_se(std::move(cov)), mean_and_se(std::move(len))};
}

std::vector<BinMetrics> binned_metrics(std::span<const RunRecord> records, double bin_width) {
  require_records(records);
  if (!(bin_width > 0.0)) throw ValidationError("metrics: bin width must be positive");
  const long bins = std::lround(2.0 / bin_width);
  if (bins < 1 || std::abs(static_cast<double>(bins) * bin_width - 2.0) > 1e-9) {
    throw ValidationError("metrics: bin width must divide 2 evenly");
  }
  const bool with_intervals = records.front().intervals.has_value();

  std::vector<std::vector<double>> err(bins), cov(bins), len(bins);
  for (const auto& rec : records) {
    const auto pairs = all_pairs(rec.truth.dim());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const double truth = rec.truth(pairs[k].j, pairs[k].jp);
      const long b = std::clamp(static_cast<long>(std::floor((truth + 1.0) / bin_width)), 0L,
                                bins - 1);
      err[b].push_back(std::abs(rec.estimate(pairs[k].j, pairs[k].jp) - truth));
      if (with_intervals) {
        const auto& iv = interval_at(rec, k);
        cov[b].push_back(covers(iv, truth) ? 1.0 : 0.0);
        len[b].push_back(iv.upper - iv.lower);
      }
    }
  }

  std::vector<BinMetrics> out(bins);
  for (long b = 0; b < bins; ++b) {
    auto& m = out[b];
    m.lower = -1.0 + static_cast<double>(b) * bin_width;
    m.upper = b + 1 == bins ? 1.0 : -1.0 + static_cast<double>(b + 1) * bin_width;
    m.count = static_cast<long>(err[b].size());
    if (m.count == 0) continue;
    m.mae = mean_and_se(std::move(err[b]));
    if (with_intervals) {
      m.coverage = mean_and_se(std::move(cov[b]));
      m.mean_length = mean_and_se(std::move(len[b]));
    }
  }
  return out;
}

MetricsReport summarize(std::span<const RunRecord> records, double bin_width) {
  require_records(records);
  MetricsReport report;
  report.replicates = static_cast<int>(records.size());
  report.pair_observations =
      static_cast<long>(records.size() * pair_count(records.front().truth.dim()));
  report.mae = mae(records);
  if (records.front().intervals) {
    const auto cl = coverage_and_length(records);
    report.coverage = cl.coverage;
    report.mean_length = cl.mean_length;
  }
  report.binned = binned_metrics(records, bin_width);
  for (const auto& r : records) {
    report.flagged_runs += r.sampler_flagged ? 1 : 0;
    report.jitter_runs += r.jitter_used ? 1 : 0;
  }
  return report;
}

RunRecord run_replicate(const SimScenario& s, int replicate, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.replicate = replicate;
  rec.seed = seed;

  Rng data_rng(derive_seed(seed, 0));
  rec.truth = random_correlation(s.p, data_rng);
  CopulaSampleInfo info;
  const Dataset data = sample_copula(rec.truth, s.marginals, s.n, data_rng, &info);
  rec.jitter_used = info.jitter_used;

  Rng noise_rng(derive_seed(seed, 2));
  if (s.estimator == EstimatorKind::kLiKendall) {
    rec.estimate = li_kendall_baseline(data, s.epsilon_total, noise_rng);
  } else {
    const auto keys = generate_tie_keys(s.n, s.p, derive_seed(seed, 1));
    const auto counts = quadrant_counts(data, keys);
    const auto budget = PrivacyBudget::split(s.epsilon_total, s.p);
    const auto noisy = privatize_counts(counts, budget, s.mechanism, noise_rng);

    if (s.estimator == EstimatorKind::kMle) {
      rec.estimate = mle_matrix(noisy).estimate;
    } else {
      Rng post_rng(derive_seed(seed, 3));
      BayesEstimate est = [&] {
        if (s.p == 2 && !s.force_mh) {
          return bayes_grid_p2(noisy.noisy.front().value, noisy.half_n, budget.epsilon_pair,
                               s.grid_size, s.alpha, post_rng, s.samples);
        }
        BayesMhOptions opt;
        opt.sampler.n_samples = s.samples;
        opt.sampler.burn_in = s.burn_in;
        opt.alpha = s.alpha;
        return bayes_mh(noisy, opt, post_rng);
      }();
      rec.estimate = est.point;
      rec.intervals = std::move(est.intervals);
      rec.sampler_flagged = est.posterior.diagnostics.flagged;
    }
  }
  rec.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

ExperimentResult run_experiment(const SimScenario& scenario) {
  scenario.validate();
  const int runs = scenario.runs;
  std::vector<std::optional<RunRecord>> slots(static_cast<std::size_t>(runs));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(runs));
  std::atomic<int> next{0};

  auto worker = [&] {
    for (int h = next++; h < runs; h = next++) {
      try {
        slots[h] = run_replicate(scenario, h,
                                 derive_seed(scenario.master_seed, static_cast<std::uint64_t>(h)));
      } catch (...) {
        errors[h] = std::current_exception();
      }
    }
  };

  int threads = scenario.threads > 0 ? scenario.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, runs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentResult result;
  result.records.reserve(slots.size());
  for (auto& s : slots) result.records.push_back(std::move(*s));
  result.report = summarize(result.records, scenario.bin_width);
  return result;
}

void write_records_csv(std::span<const RunRecord> records, std::ostream& out) {
  out << "replicate,j,jp,truth_r,est_r,lo,hi,seed\n";
  char buf[256];
  for (const auto& rec : records) {
    const auto pairs = all_pairs(rec.truth.dim());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto [j, jp] = pairs[k];
      std::snprintf(buf, sizeof buf, "%d,%d,%d,%.12f,%.12f,", rec.replicate, j, jp, rec.truth(j, jp),
                    rec.estimate(j, jp));
      out << buf;
      if (rec.intervals) {
        const auto& iv = rec.intervals->pairs[k];
        std::snprintf(buf, sizeof buf, "%.12f,%.12f", iv.lower, iv.upper);
        out << buf;
      } else {
        out << ",";
      }
      out << "," << rec.seed << "\n";
    }
  }
}

}  // namespace dpcopula

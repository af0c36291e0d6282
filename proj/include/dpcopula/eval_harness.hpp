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

// Replicated simulation experiments and their accuracy metrics.
//
// Every headline number comes with the standard error of its replicate-level
// mean. Aggregation sorts the per-replicate summaries before summing, so the
// results are bit-identical under any permutation of the records.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "dpcopula/correlation.hpp"
#include "dpcopula/estimators.hpp"
#include "dpcopula/scenario.hpp"

namespace dpcopula {

struct RunRecord {
  int replicate = 0;
  CorrelationMatrix truth = CorrelationMatrix::identity(2);
  CorrelationMatrix estimate = CorrelationMatrix::identity(2);
  std::optional<IntervalSummary> intervals;  // Bayesian estimators only
  double runtime_seconds = 0.0;
  std::uint64_t seed = 0;
  bool sampler_flagged = false;
  bool jitter_used = false;
};

struct Metric {
  double value = 0.0;
  double std_error = 0.0;
};

struct BinMetrics {
  double lower = 0.0;
  double upper = 0.0;
  long count = 0;
  std::optional<Metric> mae;
  std::optional<Metric> coverage;
  std::optional<Metric> mean_length;
};

struct CoverageLength {
  Metric coverage;
  Metric mean_length;
};

struct MetricsReport {
  int replicates = 0;
  long pair_observations = 0;
  Metric mae;
  std::optional<Metric> coverage;
  std::optional<Metric> mean_length;
  std::vector<BinMetrics> binned;
  int flagged_runs = 0;
  int jitter_runs = 0;
};

// Mean over replicates of the mean absolute off-diagonal error.
Metric mae(std::span<const RunRecord> records);

// Fraction of (replicate, pair) events whose interval contains the truth, and
// mean interval width. Standard errors use replicate-level means.
CoverageLength coverage_and_length(std::span<const RunRecord> records);

// Bins of width bin_width tiling [-1, 1]; truth = 1 goes to the last bin.
// Per-bin standard errors treat pair observations as independent.
std::vector<BinMetrics> binned_metrics(std::span<const RunRecord> records, double bin_width);

MetricsReport summarize(std::span<const RunRecord> records, double bin_width);

// One replicate: truth, data, counts, privatization and estimation, all
// driven by streams derived from seed.
RunRecord run_replicate(const SimScenario& scenario, int replicate, std::uint64_t seed);

struct ExperimentResult {
  MetricsReport report;
  std::vector<RunRecord> records;  // replicate order
};

// Replicate h uses seed derive_seed(master_seed, h). Replicates run on
// scenario.threads workers; the output does not depend on the thread count.
ExperimentResult run_experiment(const SimScenario& scenario);

// replicate,j,jp,truth_r,est_r,lo,hi,seed (lo/hi empty without intervals).
void write_records_csv(std::span<const RunRecord> records, std::ostream& out);

}  // namespace dpcopula

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

// File formats: CSV datasets in, JSON artifacts out.
//
// Noisy-count files carry only the privatized counts and public metadata
// (n, p, half_n, mechanism, budget, bounds). The CLI never writes raw data or
// exact counts.

#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "dpcopula/dp_mechanisms.hpp"
#include "dpcopula/estimators.hpp"
#include "dpcopula/eval_harness.hpp"
#include "dpcopula/quadrant_stats.hpp"

namespace dpcopula {

// Header row of column names, then one numeric row per record. Cells are
// parsed locale-independently; blank lines are skipped.
Dataset read_csv_dataset(std::istream& in);
Dataset read_csv_dataset(const std::string& path);

// {"n", "p", "half_n", "counts": [{"j", "jp", "t"}, ...]}. Exact counts are
// not private; this format is for local inspection and tests.
nlohmann::json quadrant_counts_to_json(const QuadrantCountSet& counts);
QuadrantCountSet quadrant_counts_from_json(const nlohmann::json& doc);

nlohmann::json noisy_counts_to_json(const NoisyCountSet& noisy);
NoisyCountSet noisy_counts_from_json(const nlohmann::json& doc);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);

nlohmann::json mle_estimate_to_json(const MleEstimate& est, const NoisyCountSet& source);
nlohmann::json bayes_estimate_to_json(const BayesEstimate& est, const NoisyCountSet& source,
                                      bool used_grid);

nlohmann::json scenario_to_json(const SimScenario& scenario);
nlohmann::json metrics_report_to_json(const MetricsReport& report, const SimScenario& scenario);

nlohmann::json read_json_file(const std::string& path);
// Pretty-printed with a trailing newline.
void write_json_file(const std::string& path, const nlohmann::json& doc);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace dpcopula

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

// Simulation scenarios and their flat key=value config format.
//
//   # comment
//   p = 3
//   n = 1000
//   marginals = gamma(2,1), normal(0,1), discrete(1:0.3, 2:0.3, 3:0.4)
//   epsilon = 1
//   mechanism = geometric        # geometric | tgm | btgm | rgm
//   estimator = bayes            # bayes | mle | li_kendall
//   runs = 500
//   seed = 20260101
//   samples = 4000               # posterior draws kept
//   burnin = 4000
//   grid_size = 2001             # p = 2 grid posterior
//   alpha = 0.05
//   bin_width = 0.4
//   force_mh = false
//   threads = 0                  # 0: hardware concurrency
//
// A single marginal is applied to every variable. Unknown keys are errors.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dpcopula/copula_sim.hpp"
#include "dpcopula/dp_mechanisms.hpp"

namespace dpcopula {

enum class EstimatorKind { kBayes, kMle, kLiKendall };

std::string_view to_string(EstimatorKind kind);
EstimatorKind parse_estimator(std::string_view name);

struct SimScenario {
  int p = 2;
  int n = 500;
  std::vector<MarginalSpec> marginals;  // length p
  double epsilon_total = 1.0;
  Mechanism mechanism = Mechanism::kGeometric;
  EstimatorKind estimator = EstimatorKind::kBayes;
  int runs = 500;
  std::uint64_t master_seed = 1;

  int samples = 4000;
  int burn_in = 4000;
  int grid_size = 2001;
  double alpha = 0.05;
  double bin_width = 0.4;
  bool force_mh = false;
  int threads = 0;

  // Field ranges and estimator/mechanism compatibility. Throws ValidationError.
  void validate() const;
};

SimScenario parse_scenario(std::istream& in);
SimScenario load_scenario(const std::string& path);

// Splits on commas outside parentheses.
std::vector<std::string> split_top_level(std::string_view text);

}  // namespace dpcopula

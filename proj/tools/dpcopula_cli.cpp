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

// dpcopula: privatize quadrant counts, estimate copula correlations, run
// simulation studies.
//
// Exit codes: 0 success, 2 validation error, 3 I/O error, 4 diagnostic failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dpcopula/dp_mechanisms.hpp"
#include "dpcopula/estimators.hpp"
#include "dpcopula/eval_harness.hpp"
#include "dpcopula/quadrant_stats.hpp"
#include "dpcopula/scenario.hpp"
#include "dpcopula/serialization.hpp"

namespace {

using namespace dpcopula;
using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitDiagnostic = 4;

void emit(const std::string& output, const json& doc) {
  if (output.empty() || output == "-") {
    std::cout << doc.dump(2) << "\n";
  } else {
    write_json_file(output, doc);
  }
}

struct Flags {
  std::string input;
  std::string output;
  double epsilon = 0.0;
  std::string mechanism = "geometric";
  std::uint64_t seed = 0;
  int samples = 4000;
  int burn_in = 4000;
  int grid_size = 2001;
  double alpha = 0.05;
  std::string config;
  std::string records;
  bool force_mh = false;
  bool round_btgm = false;
  std::optional<int> runs;
  std::optional<int> threads;
  long long lower = 0;
  long long upper = 10;
  double delta = 1.0;
};

int privatize_cmd(const Flags& f) {
  const Dataset data = read_csv_dataset(f.input);
  const auto keys = generate_tie_keys(data.n(), data.p(), derive_seed(f.seed, 0));
  const auto counts = quadrant_counts(data, keys);
  const auto budget = PrivacyBudget::split(f.epsilon, data.p());
  Rng rng(derive_seed(f.seed, 1));
  const auto noisy = privatize_counts(counts, budget, parse_mechanism(f.mechanism), rng,
                                      PrivatizeOptions{f.round_btgm});
  emit(f.output, noisy_counts_to_json(noisy));
  return 0;
}

int estimate_mle_cmd(const Flags& f) {
  const auto noisy = noisy_counts_from_json(read_json_file(f.input));
  emit(f.output, mle_estimate_to_json(mle_matrix(noisy), noisy));
  return 0;
}

int estimate_bayes_cmd(const Flags& f) {
  const auto noisy = noisy_counts_from_json(read_json_file(f.input));
  if (noisy.mechanism != Mechanism::kGeometric) {
    throw ValidationError("estimate-bayes models geometric noise; got " +
                          std::string(to_string(noisy.mechanism)) + " counts");
  }
  Rng rng(derive_seed(f.seed, 3));
  const bool use_grid = noisy.p == 2 && !f.force_mh;
  BayesEstimate est = [&] {
    if (use_grid) {
      return bayes_grid_p2(noisy.noisy.front().value, noisy.half_n, noisy.budget.epsilon_pair,
                           f.grid_size, f.alpha, rng, f.samples, noisy.budget.delta);
    }
    BayesMhOptions opt;
    opt.sampler.n_samples = f.samples;
    opt.sampler.burn_in = f.burn_in;
    opt.alpha = f.alpha;
    return bayes_mh(noisy, opt, rng);
  }();
  emit(f.output, bayes_estimate_to_json(est, noisy, use_grid));
  if (est.posterior.diagnostics.flagged) {
    std::cerr << "dpcopula: sampler diagnostic failure: " << est.posterior.diagnostics.message
              << "\n";
    return kExitDiagnostic;
  }
  return 0;
}

int simulate_cmd(const Flags& f) {
  SimScenario scenario = load_scenario(f.config);
  if (f.runs) scenario.runs = *f.runs;
  if (f.threads) scenario.threads = *f.threads;
  scenario.validate();
  const ExperimentResult result = run_experiment(scenario);
  if (!f.records.empty()) {
    std::ostringstream csv;
    write_records_csv(result.records, csv);
    write_text_file(f.records, csv.str());
  }
  emit(f.output, metrics_report_to_json(result.report, scenario));
  return 0;
}

int verify_dp_cmd(const Flags& f) {
  const Mechanism m = parse_mechanism(f.mechanism);
  const double observed = verify_dp_ratio(m, f.lower, f.upper, f.delta, f.epsilon);
  const bool ok = observed <= f.epsilon + 1e-9;
  emit(f.output, {{"mechanism", std::string(to_string(m))},
                  {"lower", f.lower},
                  {"upper", f.upper},
                  {"delta", f.delta},
                  {"epsilon", f.epsilon},
                  {"max_log_ratio", observed},
                  {"satisfied", ok}});
  return ok ? 0 : kExitDiagnostic;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private Gaussian-copula correlation estimation"};
  app.require_subcommand(1);
  Flags f;

  auto positive = CLI::PositiveNumber;
  auto* privatize = app.add_subcommand("privatize", "Privatize quadrant counts of a CSV dataset");
  privatize->add_option("--input", f.input, "CSV with a header row")->required();
  privatize->add_option("--output", f.output, "Noisy-count JSON (default stdout)");
  privatize->add_option("--epsilon", f.epsilon, "Total privacy budget")->required()
      ->check(positive);
  privatize->add_option("--mechanism", f.mechanism, "geometric | tgm | btgm | rgm")
      ->capture_default_str();
  privatize->add_option("--seed", f.seed, "Seed for tie keys and noise")->required();
  privatize->add_flag("--round-btgm", f.round_btgm, "Round btgm releases to integers");

  auto* mle = app.add_subcommand("estimate-mle", "Noise-naive MLE from range-preserving counts");
  mle->add_option("--input", f.input, "Noisy-count JSON")->required();
  mle->add_option("--output", f.output, "Estimate JSON (default stdout)");

  auto* bayes = app.add_subcommand("estimate-bayes", "Noise-aware posterior from geometric counts");
  bayes->add_option("--input", f.input, "Noisy-count JSON")->required();
  bayes->add_option("--output", f.output, "Estimate JSON (default stdout)");
  bayes->add_option("--seed", f.seed, "Sampler seed")->required();
  bayes->add_option("--samples", f.samples, "Posterior draws kept")->capture_default_str()
      ->check(positive);
  bayes->add_option("--burnin", f.burn_in, "Adaptation iterations")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  bayes->add_option("--grid-size", f.grid_size, "Grid cells for p = 2")->capture_default_str()
      ->check(CLI::Range(3, 1000000));
  bayes->add_option("--alpha", f.alpha, "Interval level is 1 - alpha")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  bayes->add_flag("--force-mh", f.force_mh, "Use the Metropolis sampler even for p = 2");

  auto* sim = app.add_subcommand("simulate", "Run a replicated simulation scenario");
  sim->add_option("--config", f.config, "Scenario file (key = value)")->required();
  sim->add_option("--output", f.output, "Metrics report JSON (default stdout)");
  sim->add_option("--records", f.records, "Per-replicate CSV");
  sim->add_option("--runs", f.runs, "Override the replicate count")->check(positive);
  sim->add_option("--threads", f.threads, "Worker threads (0: all cores)")
      ->check(CLI::NonNegativeNumber);

  auto* verify = app.add_subcommand("verify-dp", "Exhaustively check a mechanism's privacy loss");
  verify->add_option("--mechanism", f.mechanism, "geometric | tgm | btgm | rgm")->required();
  verify->add_option("--epsilon", f.epsilon, "Claimed epsilon")->required()->check(positive);
  verify->add_option("--lower", f.lower, "Lower bound L")->capture_default_str();
  verify->add_option("--upper", f.upper, "Upper bound U")->capture_default_str();
  verify->add_option("--delta", f.delta, "Sensitivity")->capture_default_str()->check(positive);
  verify->add_option("--output", f.output, "Result JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (privatize->parsed()) return privatize_cmd(f);
    if (mle->parsed()) return estimate_mle_cmd(f);
    if (bayes->parsed()) return estimate_bayes_cmd(f);
    if (sim->parsed()) return simulate_cmd(f);
    if (verify->parsed()) return verify_dp_cmd(f);
  } catch (const ValidationError& e) {
    std::cerr << "dpcopula: invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "dpcopula: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const DiagnosticError& e) {
    std::cerr << "dpcopula: diagnostic failure: " << e.what() << "\n";
    return kExitDiagnostic;
  }
  return kExitValidation;
}

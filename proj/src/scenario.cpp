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

#include "dpcopula/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace dpcopula {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("scenario: bad value for '" + key + "': '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ValidationError("scenario: bad boolean for '" + key + "': '" + value + "'");
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kBayes: return "bayes";
    case EstimatorKind::kMle: return "mle";
    case EstimatorKind::kLiKendall: return "li_kendall";
  }
  return "unknown";
}

EstimatorKind parse_estimator(std::string_view name) {
  if (name == "bayes") return EstimatorKind::kBayes;
  if (name == "mle") return EstimatorKind::kMle;
  if (name == "li_kendall") return EstimatorKind::kLiKendall;
  throw ValidationError("unknown estimator '" + std::string(name) +
                        "' (expected bayes, mle or li_kendall)");
}

void SimScenario::validate() const {
  if (p < 2) throw ValidationError("scenario: p must be >= 2");
  if (n < 2) throw ValidationError("scenario: n must be >= 2");
  if (static_cast<int>(marginals.size()) != p) {
    throw ValidationError("scenario: need " + std::to_string(p) + " marginals, got " +
                          std::to_string(marginals.size()));
  }
  if (!(epsilon_total > 0.0) || !std::isfinite(epsilon_total)) {
    throw ValidationError("scenario: epsilon must be positive and finite");
  }
  if (runs < 1) throw ValidationError("scenario: runs must be >= 1");
  if (samples < 1 || burn_in < 0) throw ValidationError("scenario: need samples >= 1, burnin >= 0");
  if (grid_size < 3) throw ValidationError("scenario: grid_size must be >= 3");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("scenario: alpha must lie in (0, 1)");
  if (!(bin_width > 0.0)) throw ValidationError("scenario: bin_width must be positive");
  if (threads < 0) throw ValidationError("scenario: threads must be >= 0");
  if (estimator == EstimatorKind::kMle && !is_range_preserving(mechanism)) {
    throw ValidationError(
        "scenario: the mle estimator needs a range-preserving mechanism (tgm, btgm or rgm); "
        "unbounded geometric counts can fall outside [0, half_n]");
  }
  if (estimator == EstimatorKind::kBayes && mechanism != Mechanism::kGeometric) {
    throw ValidationError("scenario: the bayes estimator models geometric noise only");
  }
}

std::vector<std::string> split_top_level(std::string_view text) {
  std::vector<std::string> out;
  int depth = 0;
  std::string current;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (depth != 0) throw ValidationError("scenario: unbalanced parentheses in '" +
                                        std::string(text) + "'");
  out.push_back(trim(current));
  return out;
}

SimScenario parse_scenario(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("scenario line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!kv.emplace(key, value).second) {
      throw ValidationError("scenario: duplicate key '" + key + "'");
    }
  }

  static const std::set<std::string> known = {
      "p", "n", "marginals", "epsilon", "mechanism", "estimator", "runs", "seed", "samples",
      "burnin", "grid_size", "alpha", "bin_width", "force_mh", "threads"};
  for (const auto& [key, value] : kv) {
    if (!known.count(key)) throw ValidationError("scenario: unknown key '" + key + "'");
  }
  for (const char* required : {"p", "n", "marginals", "epsilon", "runs", "seed"}) {
    if (!kv.count(required)) {
      throw ValidationError(std::string("scenario: missing required key '") + required + "'");
    }
  }

  SimScenario s;
  s.p = parse_number<int>("p", kv["p"]);
  s.n = parse_number<int>("n", kv["n"]);
  s.epsilon_total = parse_number<double>("epsilon", kv["epsilon"]);
  s.runs = parse_number<int>("runs", kv["runs"]);
  s.master_seed = parse_number<std::uint64_t>("seed", kv["seed"]);
  if (kv.count("mechanism")) s.mechanism = parse_mechanism(kv["mechanism"]);
  if (kv.count("estimator")) s.estimator = parse_estimator(kv["estimator"]);
  if (kv.count("samples")) s.samples = parse_number<int>("samples", kv["samples"]);
  if (kv.count("burnin")) s.burn_in = parse_number<int>("burnin", kv["burnin"]);
  if (kv.count("grid_size")) s.grid_size = parse_number<int>("grid_size", kv["grid_size"]);
  if (kv.count("alpha")) s.alpha = parse_number<double>("alpha", kv["alpha"]);
  if (kv.count("bin_width")) s.bin_width = parse_number<double>("bin_width", kv["bin_width"]);
  if (kv.count("force_mh")) s.force_mh = parse_bool("force_mh", kv["force_mh"]);
  if (kv.count("threads")) s.threads = parse_number<int>("threads", kv["threads"]);

  for (const auto& item : split_top_level(kv["marginals"])) {
    s.marginals.push_back(MarginalSpec::parse(item));
  }
  if (s.marginals.size() == 1 && s.p > 1) {
    s.marginals.assign(static_cast<std::size_t>(s.p), s.marginals.front());
  }
  s.validate();
  return s;
}

SimScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

}  // namespace dpcopula

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

#include "dpcopula/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dpcopula {
namespace {

using nlohmann::json;

constexpr const char* kNoisyFormat = "dpcopula.noisy_counts";

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

json metric_json(const Metric& m) { return {{"value", m.value}, {"std_error", m.std_error}}; }

template <class T>
json optional_metric(const std::optional<T>& m) {
  return m ? metric_json(*m) : json(nullptr);
}

json diagnostics_json(const MhDiagnostics& d) {
  return {{"acceptance_rate", d.acceptance_rate},
          {"proposal_scale", d.proposal_scale},
          {"ess", d.ess},
          {"flagged", d.flagged},
          {"message", d.message}};
}

}  // namespace

Dataset read_csv_dataset(std::istream& in) {
  std::string line;
  std::vector<std::string> names;
  while (names.empty() && std::getline(in, line)) {
    if (!trim(line).empty()) names = split_csv_line(line);
  }
  if (names.empty()) throw ValidationError("csv: empty input (expected a header row)");

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != names.size()) {
      throw ValidationError("csv line " + std::to_string(line_no) + ": expected " +
                            std::to_string(names.size()) + " cells, got " +
                            std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const std::string& c = cells[k];
      const char* end = c.data() + c.size();
      const char* begin = c.data() + (!c.empty() && c.front() == '+' ? 1 : 0);
      const auto [ptr, ec] = std::from_chars(begin, end, row[k]);
      if (c.empty() || ec != std::errc() || ptr != end || !std::isfinite(row[k])) {
        throw ValidationError("csv line " + std::to_string(line_no) + ", column '" + names[k] +
                              "': not a finite number: '" + c + "'");
      }
    }
    rows.push_back(std::move(row));
  }

  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < names.size(); ++k) values(i, k) = rows[i][k];
  }
  return Dataset(std::move(values), std::move(names));
}

Dataset read_csv_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return read_csv_dataset(in);
}

json quadrant_counts_to_json(const QuadrantCountSet& counts) {
  json entries = json::array();
  for (const auto& c : counts.counts) entries.push_back({{"j", c.j}, {"jp", c.jp}, {"t", c.t}});
  return {{"n", counts.n}, {"p", counts.p}, {"half_n", counts.half_n}, {"counts", entries}};
}

QuadrantCountSet quadrant_counts_from_json(const json& doc) {
  try {
    QuadrantCountSet out;
    out.n = doc.at("n").get<int>();
    out.p = doc.at("p").get<int>();
    out.half_n = doc.at("half_n").get<int>();
    if (out.n < 2 || out.p < 2 || out.half_n != half_count(out.n)) {
      throw ValidationError("count file: inconsistent n, p and half_n");
    }
    const auto pairs = all_pairs(out.p);
    const auto& entries = doc.at("counts");
    if (entries.size() != pairs.size()) {
      throw ValidationError("count file: expected " + std::to_string(pairs.size()) + " pairs");
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      PairCount c{entries[k].at("j").get<int>(), entries[k].at("jp").get<int>(),
                  entries[k].at("t").get<int>()};
      if (c.j != pairs[k].j || c.jp != pairs[k].jp || c.t < 0 || c.t > out.half_n) {
        throw ValidationError("count file: bad entry for pair " + std::to_string(k));
      }
      out.counts.push_back(c);
    }
    return out;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("count file: ") + e.what());
  }
}

json noisy_counts_to_json(const NoisyCountSet& noisy) {
  json counts = json::array();
  for (const auto& c : noisy.noisy) {
    json value = c.value == std::floor(c.value) ? json(static_cast<long long>(c.value))
                                                : json(c.value);
    counts.push_back({{"j", c.j}, {"jp", c.jp}, {"value", value}});
  }
  return {{"format", kNoisyFormat},
          {"n", noisy.n},
          {"p", noisy.p},
          {"half_n", noisy.half_n},
          {"mechanism", std::string(to_string(noisy.mechanism))},
          {"epsilon_total", noisy.budget.epsilon_total},
          {"epsilon_pair", noisy.budget.epsilon_pair},
          {"delta", noisy.budget.delta},
          {"bounds", noisy.bounds ? json::array({noisy.bounds->first, noisy.bounds->second})
                                  : json(nullptr)},
          {"counts", counts}};
}

NoisyCountSet noisy_counts_from_json(const json& doc) {
  try {
    if (doc.value("format", std::string()) != kNoisyFormat) {
      throw ValidationError("not a noisy-count file (missing format tag)");
    }
    NoisyCountSet out;
    out.n = doc.at("n").get<int>();
    out.p = doc.at("p").get<int>();
    out.half_n = doc.at("half_n").get<int>();
    out.mechanism = parse_mechanism(doc.at("mechanism").get<std::string>());
    out.budget = PrivacyBudget::split(doc.at("epsilon_total").get<double>(), out.p,
                                      doc.value("delta", 1.0));
    if (out.n < 2 || out.half_n != half_count(out.n)) {
      throw ValidationError("noisy-count file: inconsistent n and half_n");
    }
    if (std::abs(out.budget.epsilon_pair - doc.at("epsilon_pair").get<double>()) > 1e-12) {
      throw ValidationError("noisy-count file: epsilon_pair does not match the even split");
    }
    if (!doc.at("bounds").is_null()) {
      out.bounds = {doc["bounds"].at(0).get<long long>(), doc["bounds"].at(1).get<long long>()};
    }
    if (is_range_preserving(out.mechanism) != out.bounds.has_value()) {
      throw ValidationError("noisy-count file: bounds must be present exactly for "
                            "range-preserving mechanisms");
    }
    const auto pairs = all_pairs(out.p);
    const auto& counts = doc.at("counts");
    if (counts.size() != pairs.size()) {
      throw ValidationError("noisy-count file: expected " + std::to_string(pairs.size()) +
                            " pair entries");
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      NoisyPairCount c{counts[k].at("j").get<int>(), counts[k].at("jp").get<int>(),
                       counts[k].at("value").get<double>()};
      if (c.j != pairs[k].j || c.jp != pairs[k].jp) {
        throw ValidationError("noisy-count file: pairs out of canonical order");
      }
      out.noisy.push_back(c);
    }
    return out;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("noisy-count file: ") + e.what());
  }
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

json mle_estimate_to_json(const MleEstimate& est, const NoisyCountSet& source) {
  return {{"estimator", "mle"},
          {"n", source.n},
          {"p", source.p},
          {"mechanism", std::string(to_string(source.mechanism))},
          {"epsilon_total", source.budget.epsilon_total},
          {"estimate", matrix_to_json(est.estimate.matrix())},
          {"pairwise", matrix_to_json(est.pairwise)},
          {"was_psd", est.was_psd},
          {"frobenius_adjustment", est.frobenius_adjustment}};
}

json bayes_estimate_to_json(const BayesEstimate& est, const NoisyCountSet& source,
                            bool used_grid) {
  const auto& draws = est.posterior.draws;
  const auto& ess = est.posterior.diagnostics.ess;
  json intervals = json::array();
  for (std::size_t k = 0; k < est.intervals.pairs.size(); ++k) {
    const auto& iv = est.intervals.pairs[k];
    // Grid means are exact; chain means carry sd / sqrt(ess) Monte Carlo error.
    double mc_se = 0.0;
    if (!used_grid && draws.size() > 1 && k < ess.size()) {
      double ss = 0.0;
      for (const auto& d : draws) ss += (d(iv.j, iv.jp) - iv.mean) * (d(iv.j, iv.jp) - iv.mean);
      mc_se = std::sqrt(ss / static_cast<double>(draws.size() - 1) / std::max(ess[k], 1.0));
    }
    intervals.push_back({{"j", iv.j},
                         {"jp", iv.jp},
                         {"mean", iv.mean},
                         {"lower", iv.lower},
                         {"upper", iv.upper},
                         {"mc_std_error", mc_se}});
  }
  json diagnostics = diagnostics_json(est.posterior.diagnostics);
  diagnostics["draws"] = draws.size();
  diagnostics["burn_in"] = est.posterior.burn_in;
  return {{"estimator", "bayes"},
          {"method", used_grid ? "grid" : "mh"},
          {"n", source.n},
          {"p", source.p},
          {"mechanism", std::string(to_string(source.mechanism))},
          {"epsilon_total", source.budget.epsilon_total},
          {"alpha", est.intervals.alpha},
          {"estimate", matrix_to_json(est.point.matrix())},
          {"mean_projected", est.mean_projected},
          {"intervals", intervals},
          {"diagnostics", diagnostics}};
}

json scenario_to_json(const SimScenario& s) {
  json marginals = json::array();
  for (const auto& m : s.marginals) marginals.push_back(m.to_string());
  return {{"p", s.p},
          {"n", s.n},
          {"marginals", marginals},
          {"epsilon_total", s.epsilon_total},
          {"mechanism", std::string(to_string(s.mechanism))},
          {"estimator", std::string(to_string(s.estimator))},
          {"runs", s.runs},
          {"seed", s.master_seed},
          {"samples", s.samples},
          {"burnin", s.burn_in},
          {"grid_size", s.grid_size},
          {"alpha", s.alpha},
          {"bin_width", s.bin_width},
          {"force_mh", s.force_mh}};
}

json metrics_report_to_json(const MetricsReport& r, const SimScenario& scenario) {
  json bins = json::array();
  for (const auto& b : r.binned) {
    bins.push_back({{"lower", b.lower},
                    {"upper", b.upper},
                    {"count", b.count},
                    {"mae", optional_metric(b.mae)},
                    {"coverage", optional_metric(b.coverage)},
                    {"mean_length", optional_metric(b.mean_length)}});
  }
  return {{"scenario", scenario_to_json(scenario)},
          {"replicates", r.replicates},
          {"pair_observations", r.pair_observations},
          {"mae", metric_json(r.mae)},
          {"coverage", optional_metric(r.coverage)},
          {"mean_length", optional_metric(r.mean_length)},
          {"binned", bins},
          {"flagged_runs", r.flagged_runs},
          {"jitter_runs", r.jitter_runs}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

void write_json_file(const std::string& path, const json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

}  // namespace dpcopula

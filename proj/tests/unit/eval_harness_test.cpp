#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dpcopula/eval_harness.hpp"

using namespace dpcopula;

namespace {

CorrelationMatrix corr2(double r) {
  Eigen::Matrix2d m;
  m << 1, r, r, 1;
  return CorrelationMatrix(Eigen::MatrixXd(m));
}

RunRecord record(int h, double truth, double est, std::optional<std::pair<double, double>> iv = {}) {
  RunRecord r;
  r.replicate = h;
  r.truth = corr2(truth);
  r.estimate = corr2(est);
  if (iv) r.intervals = IntervalSummary{{{0, 1, est, iv->first, iv->second}}, 0.05};
  return r;
}

SimScenario small_scenario(EstimatorKind est, Mechanism mech, int n, int runs, std::uint64_t seed) {
  SimScenario s;
  s.p = 2;
  s.n = n;
  s.marginals = {MarginalSpec::gamma(2, 1), MarginalSpec::normal(0, 1)};
  s.epsilon_total = 1.0;
  s.mechanism = mech;
  s.estimator = est;
  s.runs = runs;
  s.master_seed = seed;
  s.threads = 1;
  return s;
}

std::string csv_of(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  write_records_csv(records, out);
  return out.str();
}

}  // namespace

TEST_SUITE("eval_harness") {

TEST_CASE("mae") {
  const std::vector<RunRecord> exact{record(0, 0.3, 0.3), record(1, -0.7, -0.7)};
  CHECK(mae(exact).value == 0.0);
  const std::vector<RunRecord> one{record(0, 0.3, 0.5)};
  CHECK(mae(one).value == doctest::Approx(0.2));
  CHECK(mae(one).std_error == 0.0);
  CHECK_THROWS_AS(mae(std::vector<RunRecord>{}), ValidationError);
}

TEST_CASE("coverage and length") {
  const std::vector<RunRecord> full{record(0, 0.3, 0.1, {{-1, 1}}), record(1, -0.9, 0.2, {{-1, 1}})};
  const auto a = coverage_and_length(full);
  CHECK(a.coverage.value == 1.0);
  CHECK(a.mean_length.value == 2.0);
  const std::vector<RunRecord> point{record(0, 0.3, 0.3, {{0.3, 0.3}})};
  const auto b = coverage_and_length(point);
  CHECK(b.coverage.value == 1.0);
  CHECK(b.mean_length.value == 0.0);
  const std::vector<RunRecord> half{record(0, 0.3, 0.3, {{0.2, 0.4}}), record(1, 0.3, 0.6, {{0.5, 0.7}})};
  CHECK(coverage_and_length(half).coverage.value == 0.5);
  const std::vector<RunRecord> none{record(0, 0.3, 0.3)};
  CHECK_THROWS_AS(coverage_and_length(none), ValidationError);
}

TEST_CASE("binned metrics") {
  const std::vector<RunRecord> recs{record(0, 0.95, 0.9, {{0.8, 1.0}}), record(1, -0.95, -0.5, {{-0.6, -0.4}}),
                                    record(2, 0.1, 0.0, {{-0.2, 0.2}}), record(3, 1.0, 1.0, {{0.9, 1.0}})};
  const auto bins = binned_metrics(recs, 0.4);
  REQUIRE(bins.size() == 5);
  CHECK(bins[4].lower == doctest::Approx(0.6));
  CHECK(bins[4].upper == 1.0);
  CHECK(bins[4].count == 2);
  CHECK(bins[0].count == 1);
  CHECK(bins[2].count == 1);
  CHECK_FALSE(bins[1].mae.has_value());
  CHECK(bins[0].coverage->value == 0.0);
  long total = 0;
  for (const auto& b : bins) total += b.count;
  CHECK(total == 4);

  const auto single = binned_metrics(recs, 2.0);
  REQUIRE(single.size() == 1);
  CHECK(single[0].mae->value == doctest::Approx(mae(recs).value));
  CHECK(single[0].coverage->value == doctest::Approx(coverage_and_length(recs).coverage.value));

  CHECK_THROWS_AS(binned_metrics(recs, 0.0), ValidationError);
  CHECK_THROWS_AS(binned_metrics(recs, 0.3), ValidationError);
}

TEST_CASE("property: metrics ignore record order") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<RunRecord> recs;
  for (int h = 0; h < 200; ++h) {
    const double t = u(rng), e = u(rng), w = std::abs(u(rng));
    recs.push_back(record(h, t, e, {{e - w, e + w}}));
  }
  const auto base = summarize(recs, 0.2);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(recs.begin(), recs.end(), rng);
    const auto s = summarize(recs, 0.2);
    CHECK(s.mae.value == base.mae.value);
    CHECK(s.mae.std_error == base.mae.std_error);
    CHECK(s.coverage->value == base.coverage->value);
    CHECK(s.mean_length->value == base.mean_length->value);
    for (std::size_t b = 0; b < s.binned.size(); ++b) {
      CHECK(s.binned[b].count == base.binned[b].count);
      if (s.binned[b].mae) CHECK(s.binned[b].mae->value == base.binned[b].mae->value);
    }
  }
}

TEST_CASE("experiments are deterministic and thread-count independent") {
  auto s = small_scenario(EstimatorKind::kBayes, Mechanism::kGeometric, 200, 12, 42);
  const auto a = run_experiment(s);
  s.threads = 3;
  const auto b = run_experiment(s);
  CHECK(csv_of(a.records) == csv_of(b.records));
  CHECK(a.report.mae.value == b.report.mae.value);
  CHECK(a.report.coverage->value == b.report.coverage->value);
  s.master_seed = 43;
  CHECK(csv_of(run_experiment(s).records) != csv_of(a.records));
  for (std::size_t h = 0; h < a.records.size(); ++h) {
    CHECK(a.records[h].replicate == static_cast<int>(h));
    CHECK(a.records[h].seed == derive_seed(42, h));
  }
}

TEST_CASE("one run reports that run") {
  const auto s = small_scenario(EstimatorKind::kBayes, Mechanism::kGeometric, 100, 1, 5);
  const auto res = run_experiment(s);
  REQUIRE(res.records.size() == 1);
  const auto& r = res.records[0];
  CHECK(res.report.replicates == 1);
  CHECK(res.report.mae.value == doctest::Approx(std::abs(r.estimate(0, 1) - r.truth(0, 1))));
  const auto& iv = r.intervals->pairs[0];
  CHECK(res.report.mean_length->value == doctest::Approx(iv.upper - iv.lower));
  const std::string csv = csv_of(res.records);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("records csv") {
  RunRecord r = record(3, 0.25, -0.5, {{-0.75, 0.125}});
  r.seed = 99;
  RunRecord m = record(4, 0.5, 0.5);
  m.seed = 7;
  CHECK(csv_of({r, m}) ==
        "replicate,j,jp,truth_r,est_r,lo,hi,seed\n"
        "3,0,1,0.250000000000,-0.500000000000,-0.750000000000,0.125000000000,99\n"
        "4,0,1,0.500000000000,0.500000000000,,,7\n");
}

TEST_CASE("incompatible estimator and mechanism are rejected before running") {
  auto s = small_scenario(EstimatorKind::kMle, Mechanism::kGeometric, 100, 5, 1);
  CHECK_THROWS_AS(run_experiment(s), ValidationError);
  s = small_scenario(EstimatorKind::kBayes, Mechanism::kBtgm, 100, 5, 1);
  CHECK_THROWS_AS(run_experiment(s), ValidationError);
  s = small_scenario(EstimatorKind::kLiKendall, Mechanism::kGeometric, 100, 2, 1);
  CHECK_FALSE(run_experiment(s).report.coverage.has_value());
}

TEST_CASE("property: error does not grow with n") {
  for (auto [est, mech] : {std::pair{EstimatorKind::kBayes, Mechanism::kGeometric},
                           std::pair{EstimatorKind::kMle, Mechanism::kBtgm}}) {
    Metric prev{INFINITY, 0};
    for (int n : {200, 500, 1000}) {
      const auto m = run_experiment(small_scenario(est, mech, n, 200, 17)).report.mae;
      CHECK(m.value <= prev.value + 2 * std::hypot(m.std_error, prev.std_error));
      prev = m;
    }
  }
}

TEST_CASE("heavy noise: correlations near zero are estimated best") {
  auto s = small_scenario(EstimatorKind::kBayes, Mechanism::kGeometric, 200, 400, 23);
  s.epsilon_total = 0.01;
  const auto bins = run_experiment(s).report.binned;
  REQUIRE(bins.size() == 5);
  CHECK(bins[2].mae->value < bins[0].mae->value - 0.2);
  CHECK(bins[2].mae->value < bins[4].mae->value - 0.2);
}

}  // TEST_SUITE

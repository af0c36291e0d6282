#include <sstream>

#include "doctest.h"
#include "dpcopula/scenario.hpp"

using namespace dpcopula;

namespace {

SimScenario parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

const std::string kMinimal = "p = 2\nn = 500\nmarginals = gamma(2,1), normal(0,1)\nepsilon = 1\nruns = 10\nseed = 7\n";

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("minimal config takes defaults") {
  const auto s = parse(kMinimal);
  CHECK(s.p == 2);
  CHECK(s.n == 500);
  CHECK(s.runs == 10);
  CHECK(s.master_seed == 7);
  CHECK(s.mechanism == Mechanism::kGeometric);
  CHECK(s.estimator == EstimatorKind::kBayes);
  CHECK(s.grid_size == 2001);
  CHECK(s.alpha == 0.05);
  CHECK(s.marginals.size() == 2);
  CHECK(s.marginals[0].family() == MarginalSpec::Family::kGamma);
}

TEST_CASE("full config with comments") {
  const auto s = parse(
      "# header\n"
      "p = 3   # three variables\n"
      "n = 1000\n"
      "marginals = discrete(1:0.3, 2:0.3, 3:0.4)\n"
      "epsilon = 0.5\n"
      "mechanism = btgm\n"
      "estimator = mle\n"
      "runs = 200\n"
      "seed = 18446744073709551615\n"
      "samples = 100\n"
      "burnin = 50\n"
      "grid_size = 501\n"
      "alpha = 0.1\n"
      "bin_width = 0.2\n"
      "force_mh = true\n"
      "threads = 2\n");
  CHECK(s.p == 3);
  CHECK(s.marginals.size() == 3);
  CHECK(s.marginals[2].family() == MarginalSpec::Family::kDiscrete);
  CHECK(s.mechanism == Mechanism::kBtgm);
  CHECK(s.estimator == EstimatorKind::kMle);
  CHECK(s.master_seed == 18446744073709551615ULL);
  CHECK(s.burn_in == 50);
  CHECK(s.force_mh);
  CHECK(s.threads == 2);
}

TEST_CASE("malformed configs are rejected") {
  CHECK_THROWS_AS(parse(kMinimal + "colour = red\n"), ValidationError);
  CHECK_THROWS_AS(parse(kMinimal + "runs = 3\n"), ValidationError);
  CHECK_THROWS_AS(parse("p = 2\nn = 500\n"), ValidationError);
  CHECK_THROWS_AS(parse(kMinimal + "alpha\n"), ValidationError);
  CHECK_THROWS_AS(parse(kMinimal + "alpha = lots\n"), ValidationError);
  CHECK_THROWS_AS(parse(kMinimal + "force_mh = maybe\n"), ValidationError);
  CHECK_THROWS_AS(parse(kMinimal + "estimator = mle\n"), ValidationError);
  CHECK_THROWS_AS(parse(kMinimal + "mechanism = tgm\n"), ValidationError);
  CHECK_THROWS_AS(parse("p = 3\nn = 50\nmarginals = normal(0,1), normal(0,1)\nepsilon = 1\nruns = 1\nseed = 1\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse("p = 2\nn = 50\nmarginals = normal(0,1)\nepsilon = 0\nruns = 1\nseed = 1\n"),
                  ValidationError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.cfg"), IoError);
}

TEST_CASE("top-level splitting respects parentheses") {
  const auto parts = split_top_level("gamma(2,1), discrete(1:0.5, 2:0.5) ,normal(0,1)");
  REQUIRE(parts.size() == 3);
  CHECK(parts[1] == "discrete(1:0.5, 2:0.5)");
  CHECK_THROWS_AS(split_top_level("gamma(2,1"), ValidationError);
}

TEST_CASE("estimator names") {
  for (auto k : {EstimatorKind::kBayes, EstimatorKind::kMle, EstimatorKind::kLiKendall}) {
    CHECK(parse_estimator(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_estimator("nuts"), ValidationError);
}

}  // TEST_SUITE

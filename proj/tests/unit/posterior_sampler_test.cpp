#include <cmath>

#include "doctest.h"
#include "dpcopula/copula_sim.hpp"
#include "dpcopula/correlation.hpp"
#include "dpcopula/posterior_sampler.hpp"
#include "oracles.hpp"

using namespace dpcopula;

TEST_SUITE("posterior_sampler") {

TEST_CASE("unconstrained round trip") {
  CHECK(unconstrained_dimension(2) == 1);
  CHECK(unconstrained_dimension(5) == 10);
  Rng rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const int p = 2 + trial % 5;
    const auto r = random_correlation(p, rng);
    const Eigen::VectorXd y = unconstrained_from_correlation(r.matrix());
    CHECK((correlation_from_unconstrained(y, p) - r.matrix()).norm() < 1e-9);
  }
  Eigen::VectorXd y(3);
  y << 0.3, -2.0, 5.0;
  CHECK(is_valid_correlation(correlation_from_unconstrained(y, 3)));
  CHECK_THROWS_AS(correlation_from_unconstrained(y, 4), ValidationError);
  Eigen::Matrix2d singular;
  singular << 1, 1, 1, 1;
  CHECK_THROWS_AS(unconstrained_from_correlation(singular), ValidationError);
}

TEST_CASE("p = 2 prior density is uniform in r") {
  // log pi(y) = log(1 - tanh(y)^2) = log |dr/dy|, so pi(r) is flat.
  for (double y : {-2.0, -0.5, 0.0, 1.3}) {
    Eigen::VectorXd v(1);
    v << y;
    double lp = 0;
    const auto m = correlation_from_unconstrained(v, 2, &lp);
    CHECK(m(0, 1) == doctest::Approx(std::tanh(y)));
    CHECK(lp == doctest::Approx(std::log(1 - std::tanh(y) * std::tanh(y))));
  }
}

TEST_CASE("effective sample size") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  std::vector<double> iid(20000), ar(20000);
  double prev = 0;
  for (std::size_t i = 0; i < iid.size(); ++i) {
    iid[i] = z(rng);
    prev = 0.5 * prev + z(rng);
    ar[i] = prev;
  }
  CHECK(effective_sample_size(iid) == doctest::Approx(20000).epsilon(0.1));
  // AR(1) with phi = 0.5: N (1 - phi) / (1 + phi).
  CHECK(effective_sample_size(ar) == doctest::Approx(20000.0 / 3).epsilon(0.15));
  CHECK(effective_sample_size(std::vector<double>(50, 1.0)) > 0);
}

TEST_CASE("prior-only chains are valid, deterministic and near the target rate") {
  MhOptions opt;
  opt.n_samples = 2000;
  opt.burn_in = 2000;
  Rng a(5), b(5);
  const auto ca = sample_correlation_mh(3, {}, opt, a);
  const auto cb = sample_correlation_mh(3, {}, opt, b);
  REQUIRE(ca.draws.size() == 2000);
  for (std::size_t s = 0; s < ca.draws.size(); ++s) {
    CHECK(ca.draws[s] == cb.draws[s]);
    CHECK(is_valid_correlation(ca.draws[s]));
  }
  CHECK_FALSE(ca.diagnostics.flagged);
  CHECK(ca.diagnostics.acceptance_rate == doctest::Approx(0.234).epsilon(0.35));
  CHECK(ca.diagnostics.ess.size() == 3);
}

TEST_CASE("prior-only marginals follow the uniform-correlation law") {
  MhOptions opt;
  opt.n_samples = 40000;
  opt.burn_in = 4000;
  Rng rng(11);
  const auto chain = sample_correlation_mh(3, {}, opt, rng);
  const double ess = chain.diagnostics.ess[0];
  const auto stride = static_cast<std::size_t>(std::ceil(chain.draws.size() / ess));
  std::vector<double> thinned;
  for (std::size_t s = 0; s < chain.draws.size(); s += stride) thinned.push_back(chain.draws[s](0, 1));
  const auto ks = oracle::ks_test(thinned, [](double x) { return oracle::lkj_uniform_pair_cdf(x, 3); });
  CHECK(ks.p_value > 1e-3);
}

TEST_CASE("acceptance outside the band is flagged") {
  MhOptions opt;
  opt.n_samples = 500;
  opt.burn_in = 500;
  opt.min_acceptance = 0.6;
  Rng rng(3);
  const auto chain = sample_correlation_mh(2, {}, opt, rng);
  CHECK(chain.diagnostics.flagged);
  CHECK_FALSE(chain.diagnostics.message.empty());

  opt.n_samples = 0;
  CHECK_THROWS_AS(sample_correlation_mh(2, {}, opt, rng), ValidationError);
  CHECK_THROWS_AS(sample_correlation_mh(1, {}, MhOptions{}, rng), ValidationError);
}

TEST_CASE("likelihood pulls the chain") {
  MhOptions opt;
  opt.n_samples = 2000;
  opt.burn_in = 2000;
  Rng rng(4);
  // Gaussian bump at r = 0.6.
  const auto chain = sample_correlation_mh(
      2, [](const Eigen::MatrixXd& r) { return -0.5 * std::pow((r(0, 1) - 0.6) / 0.05, 2); }, opt, rng);
  double mean = 0;
  for (const auto& d : chain.draws) mean += d(0, 1);
  mean /= static_cast<double>(chain.draws.size());
  CHECK(mean == doctest::Approx(0.6).epsilon(0.05));
}

}  // TEST_SUITE

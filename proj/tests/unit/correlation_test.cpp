#include <cmath>

#include "doctest.h"
#include "dpcopula/copula_sim.hpp"
#include "dpcopula/correlation.hpp"
#include "oracles.hpp"

using namespace dpcopula;

TEST_SUITE("correlation") {

TEST_CASE("validation") {
  CHECK(is_valid_correlation(Eigen::MatrixXd::Identity(4, 4)));
  Eigen::Matrix2d m;
  m << 1, 0.5, 0.4, 1;
  CHECK_FALSE(is_valid_correlation(m));
  CHECK_THROWS_AS(CorrelationMatrix(Eigen::MatrixXd(m)), ValidationError);
  m << 1.1, 0, 0, 1;
  CHECK_THROWS_AS(CorrelationMatrix(Eigen::MatrixXd(m)), ValidationError);
  m << 1, 1.2, 1.2, 1;
  CHECK_THROWS_AS(CorrelationMatrix(Eigen::MatrixXd(m)), ValidationError);
  Eigen::Matrix3d bad;
  bad << 1, 0.9, 0.9, 0.9, 1, -0.9, 0.9, -0.9, 1;
  CHECK(min_eigenvalue(bad) < 0);
  CHECK_THROWS_AS(CorrelationMatrix(Eigen::MatrixXd(bad)), ValidationError);
  m << 1, 1, 1, 1;
  CHECK_NOTHROW(CorrelationMatrix(Eigen::MatrixXd(m)));
  CHECK(CorrelationMatrix::identity(3).matrix() == Eigen::MatrixXd::Identity(3, 3));
}

TEST_CASE("projection leaves valid matrices alone") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = random_correlation(2 + trial % 6, rng);
    const auto out = nearest_correlation(r.matrix());
    CHECK(out.was_psd);
    CHECK((out.matrix - r.matrix()).norm() < 1e-10);
  }
  const auto id = nearest_correlation(Eigen::MatrixXd::Identity(5, 5));
  CHECK(id.matrix == Eigen::MatrixXd::Identity(5, 5));
}

TEST_CASE("projection of an indefinite 3x3 matches the oracle") {
  Eigen::Matrix3d bad;
  bad << 1, 0.9, 0.9, 0.9, 1, -0.9, 0.9, -0.9, 1;
  const auto out = nearest_correlation(bad);
  CHECK_FALSE(out.was_psd);
  CHECK(is_valid_correlation(out.matrix));
  CHECK(out.matrix.diagonal().isOnes(1e-12));
  CHECK(min_eigenvalue(out.matrix) >= -1e-8);
  const Eigen::Matrix3d ref = oracle::nearest_correlation_3x3(bad);
  CHECK((out.matrix - ref).norm() < 1e-4);
  CHECK(out.frobenius_adjustment == doctest::Approx((out.matrix - bad).norm()));
  // Projecting again changes nothing.
  CHECK((nearest_correlation(out.matrix).matrix - out.matrix).norm() < 1e-10);
}

TEST_CASE("property: projections of random symmetric matrices are valid and near-optimal") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(0, 1) = m(1, 0) = u(rng);
    m(0, 2) = m(2, 0) = u(rng);
    m(1, 2) = m(2, 1) = u(rng);
    const auto out = nearest_correlation(m);
    CHECK(is_valid_correlation(out.matrix));
    const Eigen::Matrix3d ref = oracle::nearest_correlation_3x3(m);
    CHECK((out.matrix - m).norm() <= (ref - m).norm() + 1e-6);
  }
}

}  // TEST_SUITE

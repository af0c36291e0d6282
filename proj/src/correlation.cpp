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

#include "dpcopula/correlation.hpp"

#include <cmath>
#include <string>

namespace dpcopula {
namespace {

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd out = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

bool is_valid_correlation(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols() || m.rows() < 1) return false;
  if (!m.allFinite()) return false;
  const Eigen::Index p = m.rows();
  for (Eigen::Index i = 0; i < p; ++i) {
    if (std::abs(m(i, i) - 1.0) > 1e-12) return false;
    for (Eigen::Index j = i + 1; j < p; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-12) return false;
      if (std::abs(m(i, j)) > 1.0 + 1e-12) return false;
    }
  }
  return min_eigenvalue(m) >= -tol;
}

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd m, double tol) : m_(std::move(m)) {
  if (!is_valid_correlation(m_, tol)) {
    throw ValidationError("matrix is not a valid correlation matrix");
  }
  // Exact symmetry and unit diagonal from here on.
  m_ = 0.5 * (m_ + m_.transpose()).eval();
  m_.diagonal().setOnes();
}

CorrelationMatrix CorrelationMatrix::identity(int p) {
  return CorrelationMatrix(Eigen::MatrixXd::Identity(p, p));
}

ProjectionResult nearest_correlation(const Eigen::MatrixXd& input, double tol,
                                     int max_iterations) {
  if (input.rows() != input.cols() || input.rows() < 1 || !input.allFinite()) {
    throw ValidationError("nearest_correlation: need a finite square matrix");
  }
  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  a.diagonal().setOnes();

  ProjectionResult out;
  // PSD within the same tolerance CorrelationMatrix accepts, so projecting a
  // projection is a no-op.
  if (min_eigenvalue(a) >= -kPsdTolerance) {
    out.matrix = a;
    out.was_psd = true;
    out.frobenius_adjustment = (a - input).norm();
    return out;
  }

  Eigen::MatrixXd y = a;
  Eigen::MatrixXd correction = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::MatrixXd r = y - correction;
    const Eigen::MatrixXd x = project_psd(r);
    correction = x - r;
    Eigen::MatrixXd y_next = x;
    y_next.diagonal().setOnes();
    const double change = (y_next - y).norm();
    y = std::move(y_next);
    if (change < tol) {
      // Finish on the PSD iterate scaled to unit diagonal: PSD by construction
      // and within tol of y, where y itself can sit slightly outside the cone.
      const Eigen::VectorXd s = x.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
      Eigen::MatrixXd z = s.asDiagonal() * x * s.asDiagonal();
      z = (0.5 * (z + z.transpose())).cwiseMax(-1.0).cwiseMin(1.0);
      z.diagonal().setOnes();
      out.matrix = z;
      out.iterations = it;
      out.frobenius_adjustment = (z - input).norm();
      return out;
    }
  }
  throw DiagnosticError("nearest_correlation: no convergence after " +
                        std::to_string(max_iterations) + " iterations");
}

}  // namespace dpcopula

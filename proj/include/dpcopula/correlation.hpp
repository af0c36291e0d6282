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

#pragma once

#include <Eigen/Dense>

#include "dpcopula/core.hpp"

namespace dpcopula {

// Eigenvalue floor accepted as positive semidefinite.
inline constexpr double kPsdTolerance = 1e-8;

double min_eigenvalue(const Eigen::MatrixXd& symmetric);

// Symmetric, unit diagonal, off-diagonals in [-1, 1], min eigenvalue >= -tol.
bool is_valid_correlation(const Eigen::MatrixXd& m, double tol = kPsdTolerance);

// A validated correlation matrix. Construction throws ValidationError on any
// violated invariant, so holding one is proof of validity.
class CorrelationMatrix {
 public:
  explicit CorrelationMatrix(Eigen::MatrixXd m, double tol = kPsdTolerance);

  static CorrelationMatrix identity(int p);

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Eigen::MatrixXd& matrix() const { return m_; }

 private:
  Eigen::MatrixXd m_;
};

struct ProjectionResult {
  Eigen::MatrixXd matrix;
  bool was_psd = false;              // input returned unchanged
  double frobenius_adjustment = 0.0; // ||output - input||_F
  int iterations = 0;
};

// Frobenius-nearest correlation matrix by alternating projections between the
// PSD cone and the unit-diagonal affine set, with Dykstra's correction on the
// PSD step. An input PSD within kPsdTolerance is returned unchanged. Throws
// DiagnosticError when the iterates have not settled to `tol` after
// `max_iterations`.
ProjectionResult nearest_correlation(const Eigen::MatrixXd& input, double tol = 1e-8,
                                     int max_iterations = 10000);

}  // namespace dpcopula

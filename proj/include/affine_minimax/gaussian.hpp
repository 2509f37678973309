// Copyright 2026 The affine_minimax Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "affine_minimax/estimator.hpp"

namespace affine_minimax {

/// x with upper standard normal tail probability y, for 0 < y < 1.
double erfinv_tail(double y);

/// sqrt(2 ln(2 / epsilon)) / erfinv_tail(epsilon).
double psi_epsilon(double epsilon);

/// Observation w = A x + xi with xi ~ N(0, I).
struct GaussianProblem {
  Mat A;
  SignalSet set = SignalSet::interval(0.0, 0.0);
  Vec g;
  double epsilon = 0.05;

  /// Requires 0 < epsilon < 1/2 and consistent dimensions.
  void validate() const;
  /// The same model as a generic problem with one N(A x, I) channel.
  EstimationProblem generic() const;
};

/// Minimizes max_{x,y in X}[g^T(x - y) + phi^T A(y - x)] + 2 erfinv_tail(eps/2) |phi|
/// and returns w -> phi^T w + c with half the minimum as risk bound.
AffineEstimator construct_gaussian(const GaussianProblem& problem,
                                   const SolverOptions& options = {});

/// max{g^T(x - y) : |A(x - y)| <= radius, x, y in X}.
double gaussian_two_point_value(const GaussianProblem& problem, double radius);

}  // namespace affine_minimax

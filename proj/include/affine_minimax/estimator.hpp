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

#include <string>
#include <vector>

#include "affine_minimax/saddle.hpp"

namespace affine_minimax {

/// g_hat(w_1, ..., w_L) = sum_l phi_l(w_l) + c.
struct AffineEstimator {
  FamilySpec spec;
  /// One test function per channel group.
  TestFunction phi;
  double c = 0.0;
  double risk_bound = 0.0;
  double epsilon = 0.0;
  double alpha = 0.0;
  double upper = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  bool certified = false;
  std::string fingerprint;

  /// `observations` lists one entry per channel, groups in order and the
  /// copies of a tied group consecutively.
  double evaluate(const std::vector<Vec>& observations) const;
};

/// Solves the saddle problem at r = ln(2 / epsilon). A solver cap does not
/// throw: the best iterate is returned with certified = false.
AffineEstimator construct(const EstimationProblem& problem, const SolverOptions& options = {});

/// Builds the estimator of a solved saddle point.
AffineEstimator estimator_from_solution(const EstimationProblem& problem,
                                        const SaddleSolution& solution);

/// 2 ln(2 / epsilon) / ln(1 / (4 epsilon)).
double theta_epsilon(double epsilon);

}  // namespace affine_minimax

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

#include <vector>

#include "affine_minimax/estimator.hpp"

namespace affine_minimax {

/// Nested signal sets X^1 in ... in X^K sharing one observation scheme.
struct NestedProblem {
  /// Channels, g and epsilon; its set is ignored.
  EstimationProblem base;
  std::vector<SignalSet> sets;
  /// Slack delta and delta' in (0, delta); non-positive selects the default
  /// delta = 1e-4 (Phi_*^K + 1), delta' = delta / 2.
  double delta = -1.0;
  double delta_prime = -1.0;

  int levels() const { return static_cast<int>(sets.size()); }
  EstimationProblem level_problem(int k) const;
  void validate() const;
};

struct Level {
  AffineEstimator estimator;
  /// Phi_*^k(ln(2K / eps)), made nondecreasing across levels.
  double phi_star = 0.0;
  double bound = 0.0;
  /// The certified risk bound exceeds phi_star + delta'.
  bool flagged = false;
};

struct AdaptiveEstimator {
  std::vector<Level> levels;
  double epsilon = 0.0;
  double delta = 0.0;
  double delta_prime = 0.0;
  double vartheta = 0.0;
};

/// Builds level k at confidence eps / K on X^k.
AdaptiveEstimator build_levels(const NestedProblem& nested, const SolverOptions& options = {});

struct Selection {
  /// 1-based index of the smallest omega-good level.
  int k = 1;
  double value = 0.0;
  std::vector<double> estimates;
};

/// Smallest k with |g^k' - g^k| <= Phi^k + Phi^k' + 2 delta for all k' >= k.
Selection select_from_estimates(const AdaptiveEstimator& est, const std::vector<double>& estimates);
Selection select_and_estimate(const AdaptiveEstimator& est, const std::vector<Vec>& observations);

/// 3 ln(2K / eps) / ln(2 / eps).
double vartheta(int K, double epsilon);

}  // namespace affine_minimax

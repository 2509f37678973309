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

#include "affine_minimax/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "affine_minimax/io.hpp"

namespace affine_minimax {

double AffineEstimator::evaluate(const std::vector<Vec>& observations) const {
  if (static_cast<int>(observations.size()) != spec.num_channels())
    throw InvalidInput("estimator expects " + std::to_string(spec.num_channels()) +
                       " channel observations, got " + std::to_string(observations.size()));
  if (static_cast<int>(phi.parts.size()) != spec.num_factors())
    throw InvalidInput("estimator has inconsistent test functions");
  double total = c;
  std::size_t at = 0;
  for (int k = 0; k < spec.num_factors(); ++k) {
    const auto& factor = spec.factors()[k];
    for (int i = 0; i < factor.count; ++i, ++at) {
      if (observations[at].size() != factor.family.obs_dim())
        throw InvalidInput("observation " + std::to_string(at) + " has dimension " +
                           std::to_string(observations[at].size()) + ", expected " +
                           std::to_string(factor.family.obs_dim()));
      total += factor.family.evaluate(phi.parts[k], observations[at]);
    }
  }
  return total;
}

AffineEstimator estimator_from_solution(const EstimationProblem& problem,
                                        const SaddleSolution& solution) {
  AffineEstimator est;
  est.spec = problem.family_spec();
  est.phi = solution.phi;
  est.epsilon = problem.epsilon;
  est.alpha = solution.alpha;
  est.c = 0.5 * (solution.U - solution.V);
  // Inexact inner maxima shift the optimal c; the larger Frank-Wolfe gap covers it.
  est.risk_bound = 0.5 * (solution.U + solution.V) + solution.alpha * solution.r + solution.inner_gap;
  est.upper = solution.upper;
  est.dual = solution.dual;
  est.gap = solution.gap;
  est.certified = solution.certified;
  est.fingerprint = problem_fingerprint(problem);
  return est;
}

AffineEstimator construct(const EstimationProblem& problem, const SolverOptions& options) {
  problem.validate();
  const double r = std::log(2.0 / problem.epsilon);
  try {
    return estimator_from_solution(problem, minimize_outer(problem, r, options));
  } catch (const SolverCapReached& cap) {
    return estimator_from_solution(problem, cap.best());
  }
}

double theta_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.25))
    throw InvalidInput("theta requires 0 < epsilon < 1/4");
  return 2.0 * std::log(2.0 / epsilon) / std::log(1.0 / (4.0 * epsilon));
}

}  // namespace affine_minimax

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

#include "affine_minimax/adaptive.hpp"

#include <cmath>

namespace affine_minimax {

EstimationProblem NestedProblem::level_problem(int k) const {
  EstimationProblem p = base;
  p.set = sets.at(k);
  p.epsilon = base.epsilon / levels();
  return p;
}

void NestedProblem::validate() const {
  if (sets.empty()) throw InvalidInput("nested problem needs at least one set");
  if (!(base.epsilon > 0.0 && base.epsilon < 0.25))
    throw InvalidInput("epsilon must satisfy 0 < epsilon < 1/4");
  for (int k = 0; k + 1 < levels(); ++k)
    if (!sets[k].is_subset_of(sets[k + 1]))
      throw InvalidInput("set " + std::to_string(k + 1) + " is not contained in set " +
                         std::to_string(k + 2));
  if (delta > 0 && !(delta_prime > 0 && delta_prime < delta))
    throw InvalidInput("delta' must lie in (0, delta)");
  for (int k = 0; k < levels(); ++k) level_problem(k).validate();
}

AdaptiveEstimator build_levels(const NestedProblem& nested, const SolverOptions& options) {
  nested.validate();
  const int K = nested.levels();
  AdaptiveEstimator out;
  out.epsilon = nested.base.epsilon;
  out.vartheta = vartheta(K, out.epsilon);

  double running = 0.0;
  for (int k = 0; k < K; ++k) {
    Level lvl;
    lvl.estimator = construct(nested.level_problem(k), options);
    running = std::max(running, 0.5 * lvl.estimator.dual);
    lvl.phi_star = running;
    out.levels.push_back(std::move(lvl));
  }
  out.delta = nested.delta > 0 ? nested.delta : 1e-4 * (out.levels.back().phi_star + 1.0);
  out.delta_prime = nested.delta > 0 ? nested.delta_prime : 0.5 * out.delta;
  for (auto& lvl : out.levels) {
    lvl.bound = lvl.phi_star + out.delta;
    lvl.flagged = lvl.estimator.risk_bound > lvl.phi_star + out.delta_prime;
  }
  return out;
}

Selection select_from_estimates(const AdaptiveEstimator& est, const std::vector<double>& estimates) {
  const int K = static_cast<int>(est.levels.size());
  if (static_cast<int>(estimates.size()) != K)
    throw InvalidInput("need one estimate per level");
  Selection sel;
  sel.estimates = estimates;
  for (int k = 0; k < K; ++k) {
    bool good = true;
    for (int j = k + 1; j < K && good; ++j)
      good = std::abs(estimates[j] - estimates[k]) <=
             est.levels[k].phi_star + est.levels[j].phi_star + 2.0 * est.delta;
    if (good) {
      sel.k = k + 1;
      sel.value = estimates[k];
      return sel;
    }
  }
  return sel;  // unreachable: the last level is always good
}

Selection select_and_estimate(const AdaptiveEstimator& est, const std::vector<Vec>& observations) {
  std::vector<double> values;
  for (const auto& lvl : est.levels) values.push_back(lvl.estimator.evaluate(observations));
  return select_from_estimates(est, values);
}

double vartheta(int K, double epsilon) {
  if (K < 1) throw InvalidInput("K must be positive");
  if (!(epsilon > 0.0 && epsilon < 0.25)) throw InvalidInput("requires 0 < epsilon < 1/4");
  return 3.0 * std::log(2.0 * K / epsilon) / std::log(2.0 / epsilon);
}

}  // namespace affine_minimax

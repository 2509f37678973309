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

#include "affine_minimax/problem.hpp"

#include <cmath>
#include <string>

namespace affine_minimax {

int EstimationProblem::num_channels() const {
  int n = 0;
  for (const auto& grp : groups) n += grp.count;
  return n;
}

void EstimationProblem::validate() const {
  if (!(epsilon > 0.0 && epsilon < 0.25))
    throw InvalidInput("epsilon must satisfy 0 < epsilon < 1/4, got " + std::to_string(epsilon));
  if (g.size() != dim())
    throw InvalidInput("functional g has dimension " + std::to_string(g.size()) +
                       ", signal set has dimension " + std::to_string(dim()));
  if (!g.allFinite()) throw InvalidInput("functional g must be finite");
  if (groups.empty()) throw InvalidInput("problem needs at least one channel group");

  for (std::size_t k = 0; k < groups.size(); ++k) {
    const auto& grp = groups[k];
    const std::string where = "channel group " + std::to_string(k);
    if (grp.count < 1) throw InvalidInput(where + ": count must be positive");
    if (grp.map.in_dim() != dim())
      throw InvalidInput(where + ": map has " + std::to_string(grp.map.in_dim()) +
                         " columns, signal dimension is " + std::to_string(dim()));
    if (grp.map.out_dim() != grp.family.param_dim() || grp.map.b.size() != grp.map.out_dim())
      throw InvalidInput(where + ": map output must have dimension " +
                         std::to_string(grp.family.param_dim()));
    if (!grp.map.A.allFinite() || !grp.map.b.allFinite())
      throw InvalidInput(where + ": map entries must be finite");

    const FamilyKind kind = grp.family.kind();
    if (kind == FamilyKind::Gaussian) continue;

    // Poisson rates and discrete probabilities must stay positive on X.
    for (int i = 0; i < grp.map.out_dim(); ++i) {
      const Vec row = grp.map.A.row(i).transpose();
      const double lowest = -set.lin_max(-row).value + grp.map.b[i];
      if (!(lowest > kDomainMargin))
        throw InvalidInput(where + ": coordinate " + std::to_string(i) +
                           " of A x + b reaches " + std::to_string(lowest) +
                           " on X; it must stay positive");
    }
    if (kind == FamilyKind::Discrete) {
      const Vec col_sums = grp.map.A.colwise().sum().transpose();
      const double scale = 1.0 + grp.map.A.cwiseAbs().maxCoeff();
      if (col_sums.cwiseAbs().maxCoeff() > 1e-9 * scale ||
          std::abs(grp.map.b.sum() - 1.0) > 1e-9)
        throw InvalidInput(where +
                           ": discrete map must have zero column sums and offsets summing to 1");
    }
  }
}

FamilySpec EstimationProblem::family_spec() const {
  std::vector<FamilyFactor> factors;
  for (const auto& grp : groups) factors.push_back({grp.family, grp.count});
  return FamilySpec(std::move(factors));
}

ParamPoint EstimationProblem::params(const Vec& x) const {
  ParamPoint mu;
  mu.parts.reserve(groups.size());
  for (const auto& grp : groups) mu.parts.push_back(grp.map.apply(x));
  return mu;
}

EstimationProblem EstimationProblem::untied() const {
  EstimationProblem out = *this;
  out.groups.clear();
  for (const auto& grp : groups)
    for (int i = 0; i < grp.count; ++i) out.groups.push_back({grp.family, grp.map, 1});
  return out;
}

double EstimationProblem::variation() const {
  return set.lin_max(g).value + set.lin_max(-g).value;
}

Mat stacked_map(const EstimationProblem& problem) {
  int rows = 0;
  for (const auto& grp : problem.groups) rows += grp.map.out_dim();
  Mat out(rows, problem.dim());
  int at = 0;
  for (const auto& grp : problem.groups) {
    out.middleRows(at, grp.map.out_dim()) = grp.map.A;
    at += grp.map.out_dim();
  }
  return out;
}

}  // namespace affine_minimax

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

#include "affine_minimax/families.hpp"
#include "affine_minimax/signal_sets.hpp"

namespace affine_minimax {

/// `count` i.i.d. channels of one family, each observing A x + b. The channels
/// of a group share one test function.
struct ChannelGroup {
  ChannelFamily family;
  AffineMap map;
  int count = 1;
};

/// Estimate g^T x from observations w_l ~ p_{A_l x + b_l}, x in X.
struct EstimationProblem {
  std::vector<ChannelGroup> groups;
  SignalSet set = SignalSet::interval(0.0, 0.0);
  Vec g;
  double epsilon = 0.05;

  int dim() const { return set.dim(); }
  int num_groups() const { return static_cast<int>(groups.size()); }
  int num_channels() const;

  /// Throws InvalidInput on dimension mismatch, epsilon outside (0, 1/4),
  /// or an affine image A(X) that leaves the parameter domain.
  void validate() const;

  FamilySpec family_spec() const;
  /// Parameters A_l x + b_l of every group.
  ParamPoint params(const Vec& x) const;
  /// The same problem with every tied group split into count-1 groups.
  EstimationProblem untied() const;
  /// max_x g^T x - min_x g^T x.
  double variation() const;
};

/// Stacked matrix [A_1; ...; A_G] (tied copies appear once).
Mat stacked_map(const EstimationProblem& problem);

}  // namespace affine_minimax

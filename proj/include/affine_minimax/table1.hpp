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

/// One row of the Bernoulli table: estimate gamma + delta * (number of ones).
struct Table1Row {
  double epsilon = 0.0;
  int L = 0;
  double gamma = 0.0;
  double delta = 0.0;
  double upper = 0.0;
  double lower = 0.0;
  double ratio = 0.0;
  double theta = 0.0;
  bool certified = true;
};

/// Published reference values, in table order.
const std::vector<Table1Row>& table1_reference();

/// L tied Bernoulli channels observing x in [lo, hi], estimating x.
EstimationProblem bernoulli_problem(double epsilon, int L, double lo, double hi);

/// Default segment [e^-16, 1 - e^-16].
EstimationProblem bernoulli_problem(double epsilon, int L);

Table1Row table1_cell(double epsilon, int L, const SolverOptions& options = {});

/// All nine cells in reference order.
std::vector<Table1Row> table1_reproduce(const SolverOptions& options = {});

}  // namespace affine_minimax

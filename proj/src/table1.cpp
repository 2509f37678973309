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

#include "affine_minimax/table1.hpp"

#include <cmath>

#include "affine_minimax/risk_lab.hpp"

namespace affine_minimax {

const std::vector<Table1Row>& table1_reference() {
  static const std::vector<Table1Row> rows{
      {0.05, 10, 2.91e-1, 4.18e-2, 3.61e-1, 2.49e-1, 1.45, 4.58},
      {0.05, 100, 4.13e-2, 9.17e-3, 1.33e-1, 8.19e-2, 1.63, 4.58},
      {0.05, 1000, 4.29e-3, 9.91e-4, 4.29e-3, 2.60e-3, 1.65, 4.58},
      {0.01, 10, 3.58e-1, 2.83e-2, 4.04e-1, 3.29e-1, 1.23, 3.29},
      {0.01, 100, 5.83e-2, 8.84e-2, 1.59e-1, 1.15e-1, 1.38, 3.29},
      {0.01, 1000, 6.15e-3, 9.88e-4, 5.13e-2, 3.67e-3, 1.40, 3.29},
      {0.001, 10, 4.19e-1, 1.61e-2, 4.42e-1, 3.98e-1, 1.11, 2.75},
      {0.001, 100, 8.15e-2, 8.37e-3, 1.88e-1, 1.51e-1, 1.24, 2.75},
      {0.001, 1000, 8.79e-3, 9.82e-4, 6.14e-3, 4.88e-3, 1.26, 2.75},
  };
  return rows;
}

EstimationProblem bernoulli_problem(double epsilon, int L, double lo, double hi) {
  EstimationProblem p;
  Mat A(2, 1);
  A << -1.0, 1.0;
  Vec b(2);
  b << 1.0, 0.0;
  p.groups.push_back({ChannelFamily::discrete(2), {A, b}, L});
  p.set = SignalSet::interval(lo, hi);
  p.g = Vec::Ones(1);
  p.epsilon = epsilon;
  p.validate();
  return p;
}

EstimationProblem bernoulli_problem(double epsilon, int L) {
  return bernoulli_problem(epsilon, L, std::exp(-16.0), 1.0 - std::exp(-16.0));
}

Table1Row table1_cell(double epsilon, int L, const SolverOptions& options) {
  const EstimationProblem p = bernoulli_problem(epsilon, L);
  const AffineEstimator est = construct(p, options);
  Table1Row row;
  row.epsilon = epsilon;
  row.L = L;
  const Vec& v = est.phi.parts[0];
  row.delta = v[1] - v[0];
  row.gamma = L * v[0] + est.c;
  row.upper = est.risk_bound;
  row.lower = bernoulli_testing_lower_bound(L, epsilon);
  row.ratio = row.upper / row.lower;
  row.theta = theta_epsilon(epsilon);
  row.certified = est.certified;
  return row;
}

std::vector<Table1Row> table1_reproduce(const SolverOptions& options) {
  std::vector<Table1Row> rows;
  for (const auto& ref : table1_reference()) rows.push_back(table1_cell(ref.epsilon, ref.L, options));
  return rows;
}

}  // namespace affine_minimax

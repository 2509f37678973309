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

#include <cstdint>

#include "affine_minimax/estimator.hpp"

namespace affine_minimax {

/// Emission tomography model: bin l counts Poisson(q_l(x)) with
/// q_l(x) = sum_i q(i, l) x_i.
struct PetModel {
  /// n x L registration probabilities.
  Mat q;
  SignalSet set = SignalSet::interval(1.0, 1.0);
  Vec g;
  double epsilon = 0.05;

  int voxels() const { return static_cast<int>(q.rows()); }
  int bins() const { return static_cast<int>(q.cols()); }

  /// Checks q >= 0, every bin registers, every voxel row sums to at most 1,
  /// X positive, and 0 < epsilon < 1/4.
  void validate() const;
  /// One Poisson channel per bin with A_l = q_l^T.
  EstimationProblem generic() const;
};

struct PetEvaluation {
  double value = 0.0;
  double U = 0.0;
  double V = 0.0;
  Vec x;
  Vec y;
  Vec grad_gamma;
  double grad_alpha = 0.0;
};

PetEvaluation pet_evaluate(const PetModel& model, const Vec& gamma, double alpha, double r);

/// max over x, y in X of the PET saddle function; exact, since it is linear
/// in x and in y.
double pet_objective(const PetModel& model, const Vec& gamma, double alpha, double r);

/// g_hat(y) = sum_l gamma_l y_l + c.
AffineEstimator pet_construct(const PetModel& model, const SolverOptions& options = {});

/// Independent Poisson bin counts at x_true.
Vec pet_simulate(const PetModel& model, const Vec& x_true, std::uint64_t seed,
                 std::uint64_t replication = 0);

/// Grid x grid phantom; bins are the grid rows then the grid columns, and
/// each voxel registers in its row and column bin with probability 0.4 each.
/// X = [lo, hi]^n and g indicates the first grid row.
PetModel pet_demo_model(int grid = 2, double lo = 1.0, double hi = 20.0, double epsilon = 0.05);

}  // namespace affine_minimax

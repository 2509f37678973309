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

#include <functional>
#include <vector>

#include "affine_minimax/types.hpp"

namespace affine_minimax {

/// A smooth function: returns f(x) and, when grad is non-null, writes the
/// gradient.
using SmoothFn = std::function<double(const Vec& x, Vec* grad)>;

/// A convex feasible region described by its two oracles.
struct Domain {
  int dim = 0;
  std::function<Vec(const Vec&)> project;
  /// argmax over the region of <c, z>.
  std::function<Vec(const Vec&)> lin_max;
};

struct ConcaveMaxOptions {
  double tol_abs = 1e-10;
  double tol_rel = 1e-12;
  int max_iter = 20000;
};

struct ConcaveMaxResult {
  Vec x;
  double value = 0.0;
  /// Frank-Wolfe gap max_z <grad f(x), z - x>; bounds f* - f(x) from above.
  double fw_gap = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Maximizes a smooth concave function by spectral projected gradient with a
/// nonmonotone Armijo search. Stops once the Frank-Wolfe gap falls below
/// tol_abs + tol_rel * |f|.
ConcaveMaxResult maximize_concave(const Domain& domain, const SmoothFn& f, const Vec& x0,
                                  const ConcaveMaxOptions& options = {});

struct FrankWolfeOptions {
  double tol = 1e-12;
  int max_iter = 200000;
};

struct FrankWolfeResult {
  Vec x;
  double value = 0.0;
  double fw_gap = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Away-step Frank-Wolfe for a convex *quadratic* f over a polytope given by a
/// vertex oracle returning argmin_v <c, v>. Line searches are exact, using the
/// fact that f restricted to a line is a parabola.
FrankWolfeResult minimize_quadratic_fw(const SmoothFn& f,
                                       const std::function<Vec(const Vec&)>& vertex_oracle,
                                       const Vec& start_vertex,
                                       const FrankWolfeOptions& options = {});

struct BundleOptions {
  int max_iter = 300;
  /// Initial step length, relative to 1 + |x0|.
  double initial_step = 0.1;
  /// Fraction of the predicted decrease a serious step must realize.
  double serious_fraction = 0.1;
  int max_cuts = 60;
  /// Stop once the predicted decrease drops below this.
  double tol = 1e-13;
};

struct BundleResult {
  Vec x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Nonsmooth convex function oracle: returns f(x) and writes one subgradient.
using SubgradFn = std::function<double(const Vec& x, Vec& subgrad)>;

/// Proximal bundle method. `stop` is consulted after every oracle call with
/// the current stability center and its value; returning true ends the run as
/// converged.
BundleResult minimize_bundle(const SubgradFn& f, const Vec& x0, const BundleOptions& options = {},
                             const std::function<bool(const Vec&, double)>& stop = {});

/// Minimizes 0.5 * |G lambda|^2 / u - b^T lambda over the unit simplex
/// (the dual of the bundle subproblem). Exposed for testing.
Vec solve_simplex_qp(const Mat& G, const Vec& b, double u, const Vec& warm = Vec());

}  // namespace affine_minimax

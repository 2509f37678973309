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

#include "affine_minimax/problem.hpp"

namespace affine_minimax {

struct SolverOptions {
  /// Target primal-dual gap relative to 1 + |dual|.
  double tol_rel = 1e-6;
  /// Frank-Wolfe gap target of each inner maximization, relative to 1 + |value|.
  double tol_inner = 1e-9;
  /// Cap on multiplier bisection steps and on outer bundle iterations.
  int max_iter = 300;
};

/// Phi_r(x, y; phi, alpha).
double phi_r(const EstimationProblem& problem, const Vec& x, const Vec& y,
             const TestFunction& phi, double alpha, double r);

/// The outer function with its two inner maximizations and a Danskin
/// subgradient. `upper` adds the inner Frank-Wolfe gaps to `value`, so it is a
/// guaranteed upper bound on the exact outer value.
struct OuterEvaluation {
  double value = 0.0;
  double upper = 0.0;
  double U = 0.0;
  double V = 0.0;
  Vec x;
  Vec y;
  double gap_u = 0.0;
  double gap_v = 0.0;
  TestFunction grad_phi;
  double grad_alpha = 0.0;
};

OuterEvaluation outer_value(const EstimationProblem& problem, const TestFunction& phi,
                            double alpha, double r, const SolverOptions& options = {});

/// max g^T(x - y) subject to sum_l ln AffH(A_l x, A_l y) >= -r over X x X.
struct DualResult {
  Vec x;
  Vec y;
  /// Value of a feasible pair: a certified lower bound on 2 Phi_*(r).
  double value = 0.0;
  /// Lagrangian bound: a certified upper bound on 2 Phi_*(r).
  double upper = 0.0;
  double lambda = 0.0;
  /// Maximizer of the Lagrangian at `lambda`, used for the primal warm start.
  Vec x_lagrange;
  Vec y_lagrange;
  bool constraint_active = false;
  int iterations = 0;
  bool converged = false;
};

DualResult hellinger_dual(const EstimationProblem& problem, double r,
                          const SolverOptions& options = {});

struct SaddleSolution {
  TestFunction phi;
  double alpha = 1.0;
  /// Certified upper value of the outer function at (phi, alpha).
  double upper = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  double r = 0.0;
  Vec x_bar;
  Vec y_bar;
  /// Inner maximizers and values at (phi, alpha).
  Vec x_u;
  Vec y_v;
  double U = 0.0;
  double V = 0.0;
  double inner_gap = 0.0;
  int iterations = 0;
  bool certified = false;
};

/// Raised by minimize_outer when the gap target is not met within max_iter;
/// carries the best solution found.
class SolverCapReached : public SolverError {
 public:
  SolverCapReached(const std::string& what, SaddleSolution best)
      : SolverError(what), best_(std::move(best)) {}
  const SaddleSolution& best() const { return best_; }

 private:
  SaddleSolution best_;
};

SaddleSolution minimize_outer(const EstimationProblem& problem, double r,
                              const SolverOptions& options = {});

struct ConcavityTriple {
  double r_lo = 0.0;
  double r_mid = 0.0;
  double r_hi = 0.0;
  bool passed = false;
};

struct ConcavityReport {
  std::vector<double> r;
  std::vector<double> phi_star;
  bool nonnegative = true;
  bool monotone = true;
  /// Phi_*(t r) >= t Phi_*(r) for every pair r_i < r_j.
  bool scaling = true;
  std::vector<ConcavityTriple> triples;
  bool passed() const;
};

ConcavityReport phi_star_concavity_check(const EstimationProblem& problem,
                                         const std::vector<double>& r_list,
                                         const SolverOptions& options = {});

/// Phi_*(r), half the dual value.
double phi_star(const EstimationProblem& problem, double r, const SolverOptions& options = {});

}  // namespace affine_minimax

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

#include "affine_minimax/pet.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "affine_minimax/io.hpp"
#include "affine_minimax/optim.hpp"

namespace affine_minimax {

void PetModel::validate() const {
  if (!(epsilon > 0.0 && epsilon < 0.25))
    throw InvalidInput("epsilon must satisfy 0 < epsilon < 1/4, got " + std::to_string(epsilon));
  if (q.rows() != set.dim())
    throw InvalidInput("q has " + std::to_string(q.rows()) + " rows, signal dimension is " +
                       std::to_string(set.dim()));
  if (g.size() != set.dim()) throw InvalidInput("functional g does not match the signal dimension");
  if (q.cols() < 1) throw InvalidInput("q needs at least one bin");
  if (!q.allFinite() || q.minCoeff() < 0) throw InvalidInput("q must be finite and nonnegative");
  for (int l = 0; l < bins(); ++l)
    if (!(q.col(l).sum() > 0)) throw InvalidInput("bin " + std::to_string(l) + " never registers");
  for (int i = 0; i < voxels(); ++i)
    if (q.row(i).sum() > 1.0 + 1e-12)
      throw InvalidInput("voxel " + std::to_string(i) + " registers with total probability above 1");
  for (int i = 0; i < voxels(); ++i) {
    const Vec e = Vec::Unit(voxels(), i);
    if (!(-set.lin_max(-e).value > 0))
      throw InvalidInput("signal set must be strictly positive (coordinate " + std::to_string(i) + ")");
  }
}

EstimationProblem PetModel::generic() const {
  EstimationProblem p;
  for (int l = 0; l < bins(); ++l)
    p.groups.push_back({ChannelFamily::poisson(), {q.col(l).transpose(), Vec::Zero(1)}, 1});
  p.set = set;
  p.g = g;
  p.epsilon = epsilon;
  return p;
}

PetEvaluation pet_evaluate(const PetModel& model, const Vec& gamma, double alpha, double r) {
  if (!(alpha > 0) || !std::isfinite(alpha)) throw InvalidInput("alpha must be positive and finite");
  if (gamma.size() != model.bins()) throw InvalidInput("gamma must have one entry per bin");
  const Eigen::ArrayXd down = (-gamma.array() / alpha).exp();
  const Eigen::ArrayXd up = (gamma.array() / alpha).exp();
  const Vec cu = model.g + alpha * (model.q * (down - 1.0).matrix());
  const Vec cv = -model.g + alpha * (model.q * (up - 1.0).matrix());
  const LinMax u = model.set.lin_max(cu);
  const LinMax v = model.set.lin_max(cv);
  PetEvaluation ev;
  ev.U = u.value;
  ev.V = v.value;
  ev.x = u.point;
  ev.y = v.point;
  ev.value = ev.U + ev.V + 2.0 * alpha * r;
  if (!std::isfinite(ev.value)) {
    ev.value = std::numeric_limits<double>::infinity();
    return ev;
  }
  const Eigen::ArrayXd qx = (model.q.transpose() * ev.x).array();
  const Eigen::ArrayXd qy = (model.q.transpose() * ev.y).array();
  const Eigen::ArrayXd t = gamma.array() / alpha;
  ev.grad_gamma = (qy * up - qx * down).matrix();
  ev.grad_alpha = (qx * (down * (1.0 + t) - 1.0)).sum() + (qy * (up * (1.0 - t) - 1.0)).sum() + 2.0 * r;
  return ev;
}

double pet_objective(const PetModel& model, const Vec& gamma, double alpha, double r) {
  return pet_evaluate(model, gamma, alpha, r).value;
}

AffineEstimator pet_construct(const PetModel& model, const SolverOptions& options) {
  model.validate();
  const double r = std::log(2.0 / model.epsilon);
  const EstimationProblem generic = model.generic();
  const DualResult dual = hellinger_dual(generic, r, options);
  const double tol = options.tol_rel * (1.0 + std::abs(dual.value));
  // Run past the certification target so that the two routes agree closely.
  const double target = 1e-2 * tol;

  const int L = model.bins();
  PetEvaluation best;
  best.value = std::numeric_limits<double>::infinity();
  Vec best_gamma = Vec::Zero(L);
  double best_alpha = 1.0;
  const SubgradFn f = [&](const Vec& v, Vec& sub) {
    const double alpha = std::exp(v[L]);
    sub.setZero(L + 1);
    if (!(alpha > 0) || !std::isfinite(alpha)) return std::numeric_limits<double>::infinity();
    PetEvaluation ev = pet_evaluate(model, v.head(L), alpha, r);
    if (!std::isfinite(ev.value)) return ev.value;
    sub << ev.grad_gamma, alpha * ev.grad_alpha;
    if (ev.value < best.value) {
      best = ev;
      best_gamma = v.head(L);
      best_alpha = alpha;
    }
    return ev.value;
  };
  BundleOptions bopts;
  bopts.max_iter = 10 * options.max_iter;
  bopts.tol = 1e-3 * target;
  const auto done = [&](const Vec&, double) { return best.value - dual.value <= target; };
  // Warm start from the multiplier of the dual: alpha = lambda / 2 and gamma
  // the scaled half log ratio of the bin rates at the Lagrangian maximizers.
  Vec v0 = Vec::Zero(L + 1);
  if (dual.lambda > 0) {
    const double alpha0 = 0.5 * dual.lambda;
    const Eigen::ArrayXd mu = (model.q.transpose() * dual.x_lagrange).array();
    const Eigen::ArrayXd nu = (model.q.transpose() * dual.y_lagrange).array();
    v0.head(L) = (0.5 * alpha0 * (mu.log() - nu.log())).matrix();
    v0[L] = std::log(alpha0);
  } else {
    v0[L] = std::log(tol / (4.0 * r));
  }
  Vec scratch;
  f(v0, scratch);
  if (!done(v0, 0.0)) minimize_bundle(f, v0, bopts, done);
  if (!done(v0, 0.0)) {
    // Cold start: gamma = 0 and alpha at the scale of the functional's variation.
    Vec cold = Vec::Zero(L + 1);
    cold[L] = std::log(std::max(generic.variation(), 1e-12) / r);
    minimize_bundle(f, cold, bopts, done);
  }

  AffineEstimator est;
  est.spec = generic.family_spec();
  for (int l = 0; l < L; ++l) {
    Vec coef(2);
    coef << best_gamma[l], 0.0;
    est.phi.parts.push_back(coef);
  }
  est.c = 0.5 * (best.U - best.V);
  est.risk_bound = 0.5 * best.value;
  est.epsilon = model.epsilon;
  est.alpha = best_alpha;
  est.upper = best.value;
  est.dual = dual.value;
  est.gap = std::max(0.0, best.value - dual.value);
  est.certified = est.gap <= tol;
  est.fingerprint = problem_fingerprint(generic);
  return est;
}

Vec pet_simulate(const PetModel& model, const Vec& x_true, std::uint64_t seed,
                 std::uint64_t replication) {
  if (!model.set.contains(x_true)) throw InvalidInput("x_true lies outside the signal set");
  Philox rng(seed, 0, static_cast<std::uint32_t>(replication));
  const Vec rates = model.q.transpose() * x_true;
  Vec counts(model.bins());
  for (int l = 0; l < model.bins(); ++l)
    counts[l] = static_cast<double>(std::poisson_distribution<long>(rates[l])(rng));
  return counts;
}

PetModel pet_demo_model(int grid, double lo, double hi, double epsilon) {
  if (grid < 1) throw InvalidInput("grid size must be positive");
  const int n = grid * grid;
  PetModel m;
  m.q = Mat::Zero(n, 2 * grid);
  for (int row = 0; row < grid; ++row)
    for (int col = 0; col < grid; ++col) {
      const int i = row * grid + col;
      m.q(i, row) = 0.4;
      m.q(i, grid + col) = 0.4;
    }
  m.set = SignalSet::box(Vec::Constant(n, lo), Vec::Constant(n, hi));
  m.g = Vec::Zero(n);
  m.g.head(grid).setOnes();
  m.epsilon = epsilon;
  m.validate();
  return m;
}

}  // namespace affine_minimax

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

#include "affine_minimax/gaussian.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "affine_minimax/io.hpp"
#include "affine_minimax/optim.hpp"

namespace affine_minimax {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Rational approximation of the standard normal lower quantile (relative
/// error about 1e-9), polished below.
double normal_quantile_rough(double p) {
  static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                           -2.759285104469687e+02, 1.383577518672690e+02,
                                           -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                           -1.556989798598866e+02, 6.680131188771972e+01,
                                           -1.328068155288572e+01};
  static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                           -2.400758277161838e+00, -2.549732539343734e+00,
                                           4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                           2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double erfinv_tail(double y) {
  if (!(y > 0.0 && y < 1.0)) throw InvalidInput("erfinv_tail requires 0 < y < 1");
  // Work with the upper tail directly: Q(x) = erfc(x / sqrt 2) / 2.
  double x = -normal_quantile_rough(y);
  for (int i = 0; i < 3; ++i) {
    const double tail = 0.5 * std::erfc(x * kInvSqrt2);
    const double density = kInvSqrt2Pi * std::exp(-0.5 * x * x);
    if (!(density > 0)) break;
    // Halley step on Q(x) - y = 0.
    const double u = (tail - y) / density;
    x += u / (1.0 - 0.5 * x * u);
  }
  return x;
}

double psi_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw InvalidInput("psi requires 0 < epsilon < 1/2");
  return std::sqrt(2.0 * std::log(2.0 / epsilon)) / erfinv_tail(epsilon);
}

void GaussianProblem::validate() const {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw InvalidInput("gaussian problem requires 0 < epsilon < 1/2, got " +
                       std::to_string(epsilon));
  if (A.cols() != set.dim())
    throw InvalidInput("matrix A has " + std::to_string(A.cols()) +
                       " columns, signal dimension is " + std::to_string(set.dim()));
  if (A.rows() < 1) throw InvalidInput("matrix A needs at least one row");
  if (g.size() != set.dim()) throw InvalidInput("functional g does not match the signal dimension");
  if (!A.allFinite() || !g.allFinite()) throw InvalidInput("A and g must be finite");
}

EstimationProblem GaussianProblem::generic() const {
  EstimationProblem p;
  p.groups.push_back(
      {ChannelFamily::gaussian_identity(static_cast<int>(A.rows())), {A, Vec::Zero(A.rows())}, 1});
  p.set = set;
  p.g = g;
  p.epsilon = epsilon;
  return p;
}

namespace {

struct PsiEvaluation {
  double U = 0.0;
  double V = 0.0;
  double value = 0.0;
  Vec subgrad;
};

PsiEvaluation psi_bar(const GaussianProblem& pr, const Vec& phi, double radius) {
  PsiEvaluation ev;
  const Vec atphi = pr.A.transpose() * phi;
  const LinMax u = pr.set.lin_max(pr.g - atphi);
  const LinMax v = pr.set.lin_max(atphi - pr.g);
  ev.U = u.value;
  ev.V = v.value;
  const double norm = phi.norm();
  ev.value = ev.U + ev.V + radius * norm;
  ev.subgrad = pr.A * (v.point - u.point);
  if (norm > 0) ev.subgrad += (radius / norm) * phi;
  return ev;
}

}  // namespace

AffineEstimator construct_gaussian(const GaussianProblem& problem, const SolverOptions& options) {
  problem.validate();
  const double radius = 2.0 * erfinv_tail(0.5 * problem.epsilon);
  const EstimationProblem generic = problem.generic();
  // The two-point program with |A(x - y)| <= R is the affinity program at r = R^2 / 8.
  const DualResult dual = hellinger_dual(generic, radius * radius / 8.0, options);
  const double tol = options.tol_rel * (1.0 + std::abs(dual.value));

  Vec phi = Vec::Zero(problem.A.rows());
  if (dual.lambda > 0) phi = 0.25 * dual.lambda * (problem.A * (dual.x_lagrange - dual.y_lagrange));
  PsiEvaluation best = psi_bar(problem, phi, radius);
  Vec best_phi = phi;

  if (best.value - dual.value > tol) {
    const SubgradFn f = [&](const Vec& p, Vec& sub) {
      PsiEvaluation ev = psi_bar(problem, p, radius);
      sub = ev.subgrad;
      if (ev.value < best.value) {
        best = ev;
        best_phi = p;
      }
      return ev.value;
    };
    BundleOptions bopts;
    bopts.max_iter = options.max_iter;
    bopts.tol = 1e-3 * tol;
    minimize_bundle(f, best_phi, bopts,
                    [&](const Vec&, double) { return best.value - dual.value <= tol; });
  }

  AffineEstimator est;
  est.spec = generic.family_spec();
  Vec coef(problem.A.rows() + 1);
  coef << best_phi, 0.0;
  est.phi.parts = {coef};
  est.c = 0.5 * (best.U - best.V);
  est.risk_bound = 0.5 * best.value;
  est.epsilon = problem.epsilon;
  est.upper = best.value;
  est.dual = dual.value;
  est.gap = std::max(0.0, best.value - dual.value);
  est.certified = est.gap <= tol;
  est.fingerprint = problem_fingerprint(generic);
  return est;
}

double gaussian_two_point_value(const GaussianProblem& problem, double radius) {
  if (!(radius >= 0) || !std::isfinite(radius))
    throw InvalidInput("radius must be finite and nonnegative");
  const SignalSet& set = problem.set;
  const Mat& A = problem.A;
  const Vec& g = problem.g;
  const int n = set.dim();

  const LinMax top = set.lin_max(g);
  const LinMax bottom = set.lin_max(-g);
  const double variation = top.value + bottom.value;
  if (variation <= 0) return 0.0;
  if ((A * (top.point - bottom.point)).norm() <= radius) return variation;
  if (radius == 0.0) {
    Eigen::ColPivHouseholderQR<Mat> qr(A);
    if (qr.rank() == n) return 0.0;
  }

  // D(mu) = max_{x,y} g^T(x - y) - mu/2 (|A(x - y)|^2 - R^2) is convex in mu
  // with minimum equal to the two-point value. Each inner problem is a
  // concave quadratic over X x X, solved by away-step Frank-Wolfe.
  const double scale = 1.0 + variation;
  Vec start(2 * n);
  start << top.point, bottom.point;
  Vec z = start;
  auto oracle = [&](const Vec& c) {
    Vec out(2 * n);
    out << set.lin_max(-c.head(n)).point, set.lin_max(-c.tail(n)).point;
    return out;
  };
  double upper = variation;
  double lower = 0.0;
  auto solve = [&](double mu) {
    const SmoothFn neg = [&](const Vec& w, Vec* grad) {
      const Vec d = w.head(n) - w.tail(n);
      const Vec ad = A * d;
      if (grad) {
        const Vec gd = -g + mu * (A.transpose() * ad);
        grad->resize(2 * n);
        *grad << gd, -gd;
      }
      return -g.dot(d) + 0.5 * mu * (ad.squaredNorm() - radius * radius);
    };
    FrankWolfeOptions opts;
    opts.tol = 1e-13 * scale;
    const auto res = minimize_quadratic_fw(neg, oracle, start, opts);
    z = res.x;
    upper = std::min(upper, -res.value + res.fw_gap);
    const Vec d = z.head(n) - z.tail(n);
    const double norm = (A * d).norm();
    // Shrinking both points toward their midpoint keeps them in X.
    const double t = norm > radius ? radius / norm : 1.0;
    lower = std::max(lower, t * g.dot(d));
    return norm <= radius;
  };

  double mu = variation / std::max(radius * radius, 1e-300);
  double mu_feasible = std::numeric_limits<double>::infinity(), mu_infeasible = 0.0;
  for (int i = 0; i < 200; ++i) {
    if (solve(mu)) {
      mu_feasible = mu;
      break;
    }
    mu_infeasible = mu;
    mu *= 4.0;
  }
  for (int i = 0; i < 200 && upper - lower > 1e-11 * scale; ++i) {
    if (!std::isfinite(mu_feasible)) break;
    const double next = mu_infeasible > 0 ? std::sqrt(mu_feasible * mu_infeasible)
                                          : 0.25 * mu_feasible;
    if (mu_infeasible > 0 && mu_feasible / mu_infeasible - 1.0 < 1e-15) break;
    if (solve(next))
      mu_feasible = next;
    else
      mu_infeasible = next;
  }
  return upper;
}

}  // namespace affine_minimax

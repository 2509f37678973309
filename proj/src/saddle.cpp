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

#include "affine_minimax/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "affine_minimax/optim.hpp"

namespace affine_minimax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
/// Relative accuracy of the multiplier search in hellinger_dual.
constexpr double kDualTol = 1e-10;

Domain set_domain(const SignalSet& set) {
  return {set.dim(), [&set](const Vec& z) { return set.project(z); },
          [&set](const Vec& c) { return set.lin_max(c).point; }};
}

Domain pair_domain(const SignalSet& set) {
  const int n = set.dim();
  return {2 * n,
          [&set, n](const Vec& z) {
            Vec out(2 * n);
            out << set.project(z.head(n)), set.project(z.tail(n));
            return out;
          },
          [&set, n](const Vec& c) {
            Vec out(2 * n);
            out << set.lin_max(c.head(n)).point, set.lin_max(c.tail(n)).point;
            return out;
          }};
}

bool all_affine_in_mu(const EstimationProblem& problem) {
  return std::all_of(problem.groups.begin(), problem.groups.end(),
                     [](const ChannelGroup& grp) { return grp.family.lem_affine_in_mu(); });
}

/// alpha * sum_l m_l lem(psi_l, A_l x + b_l) with psi_l = sign * phi_l / alpha,
/// and its gradient in x.
double lem_terms(const EstimationProblem& problem, const TestFunction& phi, double alpha,
                 double sign, const Vec& x, Vec* grad) {
  double total = 0.0;
  if (grad) grad->setZero(x.size());
  for (int k = 0; k < problem.num_groups(); ++k) {
    const auto& grp = problem.groups[k];
    const Vec psi = (sign / alpha) * phi.parts[k];
    const Vec mu = grp.map.apply(x);
    total += alpha * grp.count * grp.family.lem(psi, mu);
    if (grad)
      *grad += (alpha * grp.count) * (grp.map.A.transpose() * grp.family.lem_grad_mu(psi, mu));
  }
  return total;
}

struct InnerSolve {
  double value = 0.0;
  Vec point;
  double gap = 0.0;
};

/// max_x sign_g * g^T x + lem_terms(sign_phi).
InnerSolve inner_max(const EstimationProblem& problem, const TestFunction& phi, double alpha,
                     double sign_g, double sign_phi, double tol_inner) {
  const SignalSet& set = problem.set;
  const SmoothFn f = [&](const Vec& x, Vec* grad) {
    const double v = sign_g * problem.g.dot(x) + lem_terms(problem, phi, alpha, sign_phi, x, grad);
    if (grad) *grad += sign_g * problem.g;
    return v;
  };
  InnerSolve out;
  if (all_affine_in_mu(problem)) {
    // Linear in x: one call to the linear oracle is exact.
    Vec c(set.dim());
    f(set.center(), &c);
    out.point = set.lin_max(c).point;
    out.value = f(out.point, nullptr);
    out.gap = 0.0;
    return out;
  }
  ConcaveMaxOptions opts;
  opts.tol_rel = tol_inner;
  opts.tol_abs = tol_inner;
  const auto res = maximize_concave(set_domain(set), f, set.center(), opts);
  out.point = res.x;
  out.value = res.value;
  out.gap = res.fw_gap;
  return out;
}

void check_alpha(double alpha) {
  if (!(alpha > 0) || !std::isfinite(alpha)) throw InvalidInput("alpha must be positive and finite");
}

void check_phi(const EstimationProblem& problem, const TestFunction& phi) {
  if (static_cast<int>(phi.parts.size()) != problem.num_groups())
    throw InvalidInput("test function must have one part per channel group");
  for (int k = 0; k < problem.num_groups(); ++k)
    if (phi.parts[k].size() != problem.groups[k].family.coef_dim())
      throw InvalidInput("test function part " + std::to_string(k) + " has wrong dimension");
}

/// Half of the log-likelihood ratio between the images of x and y, scaled by
/// alpha: the inner-optimal test function for the pair.
TestFunction pair_test_function(const EstimationProblem& problem, const Vec& x, const Vec& y,
                                double alpha) {
  TestFunction phi;
  for (const auto& grp : problem.groups)
    phi.parts.push_back((0.5 * alpha) *
                        grp.family.log_likelihood_ratio(grp.map.apply(x), grp.map.apply(y)));
  return phi;
}

double pair_affinity(const EstimationProblem& problem, const Vec& x, const Vec& y, Vec* grad) {
  const int n = problem.dim();
  double h = 0.0;
  if (grad) grad->setZero(2 * n);
  Vec gm, gn;
  for (const auto& grp : problem.groups) {
    const Vec mu = grp.map.apply(x);
    const Vec nu = grp.map.apply(y);
    h += grp.count * grp.family.affinity_log(mu, nu);
    if (grad) {
      grp.family.affinity_log_grad(mu, nu, gm, gn);
      grad->head(n) += grp.count * (grp.map.A.transpose() * gm);
      grad->tail(n) += grp.count * (grp.map.A.transpose() * gn);
    }
  }
  return h;
}

bool stacked_injective(const EstimationProblem& problem) {
  const Mat a = stacked_map(problem);
  Eigen::ColPivHouseholderQR<Mat> qr(a);
  return qr.rank() == problem.dim();
}

// max{g^T(x - y) : S x = S y, x, y in X} through its Lagrangian dual
// min_nu lin_max(g - S^T nu) + lin_max(S^T nu - g), which is exact for
// polyhedral X.
DualResult equality_dual(const EstimationProblem& problem, int max_iter, double scale) {
  const Mat S = stacked_map(problem);
  const SignalSet& set = problem.set;
  DualResult res;
  res.upper = std::numeric_limits<double>::infinity();
  const SubgradFn h = [&](const Vec& nu, Vec& sub) {
    const Vec c = problem.g - S.transpose() * nu;
    const LinMax u = set.lin_max(c);
    const LinMax v = set.lin_max(-c);
    sub = -S * (u.point - v.point);
    const double value = u.value + v.value;
    if (value < res.upper) {
      res.upper = value;
      res.x = res.x_lagrange = u.point;
      res.y = res.y_lagrange = v.point;
    }
    return value;
  };
  BundleOptions bopts;
  bopts.max_iter = 10 * max_iter;
  bopts.tol = 1e-3 * kDualTol * scale;
  const BundleResult b = minimize_bundle(h, Vec::Zero(S.rows()), bopts);
  res.value = res.upper;
  res.constraint_active = true;
  res.iterations = b.iterations;
  res.converged = b.converged;
  return res;
}

Vec flatten(const TestFunction& phi, double s) {
  int n = 1;
  for (const auto& p : phi.parts) n += static_cast<int>(p.size());
  Vec v(n);
  int at = 0;
  for (const auto& p : phi.parts) {
    v.segment(at, p.size()) = p;
    at += static_cast<int>(p.size());
  }
  v[at] = s;
  return v;
}

TestFunction unflatten(const EstimationProblem& problem, const Vec& v) {
  TestFunction phi;
  int at = 0;
  for (const auto& grp : problem.groups) {
    const int d = grp.family.coef_dim();
    phi.parts.push_back(v.segment(at, d));
    at += d;
  }
  return phi;
}

}  // namespace

double phi_r(const EstimationProblem& problem, const Vec& x, const Vec& y, const TestFunction& phi,
             double alpha, double r) {
  check_alpha(alpha);
  check_phi(problem, phi);
  if (!problem.set.contains(x) || !problem.set.contains(y))
    throw InvalidInput("phi_r requires x and y in the signal set");
  return problem.g.dot(x - y) + lem_terms(problem, phi, alpha, -1.0, x, nullptr) +
         lem_terms(problem, phi, alpha, 1.0, y, nullptr) + 2.0 * alpha * r;
}

OuterEvaluation outer_value(const EstimationProblem& problem, const TestFunction& phi, double alpha,
                            double r, const SolverOptions& options) {
  check_alpha(alpha);
  check_phi(problem, phi);
  OuterEvaluation ev;
  const InnerSolve u = inner_max(problem, phi, alpha, 1.0, -1.0, options.tol_inner);
  const InnerSolve v = inner_max(problem, phi, alpha, -1.0, 1.0, options.tol_inner);
  ev.U = u.value;
  ev.V = v.value;
  ev.x = u.point;
  ev.y = v.point;
  ev.gap_u = u.gap;
  ev.gap_v = v.gap;
  ev.value = ev.U + ev.V + 2.0 * alpha * r;
  ev.upper = ev.value + ev.gap_u + ev.gap_v;
  if (!std::isfinite(ev.value)) {
    ev.value = ev.upper = kInf;
    return ev;
  }

  ev.grad_alpha = 2.0 * r;
  for (int k = 0; k < problem.num_groups(); ++k) {
    const auto& grp = problem.groups[k];
    const Vec psi_u = (-1.0 / alpha) * phi.parts[k];
    const Vec psi_v = (1.0 / alpha) * phi.parts[k];
    const Vec mu = grp.map.apply(ev.x);
    const Vec nu = grp.map.apply(ev.y);
    const Vec gu = grp.family.lem_grad_phi(psi_u, mu);
    const Vec gv = grp.family.lem_grad_phi(psi_v, nu);
    ev.grad_phi.parts.push_back(grp.count * (gv - gu));
    ev.grad_alpha += grp.count * (grp.family.lem(psi_u, mu) - gu.dot(psi_u) +
                                  grp.family.lem(psi_v, nu) - gv.dot(psi_v));
  }
  return ev;
}

DualResult hellinger_dual(const EstimationProblem& problem, double r, const SolverOptions& options) {
  if (!(r >= 0) || !std::isfinite(r)) throw InvalidInput("r must be finite and nonnegative");
  const SignalSet& set = problem.set;
  const int n = problem.dim();
  const Vec& g = problem.g;
  DualResult res;

  const LinMax top = set.lin_max(g);
  const LinMax bottom = set.lin_max(-g);
  const double variation = top.value + bottom.value;
  const double scale = 1.0 + variation;

  auto finish_trivial = [&](const Vec& x, const Vec& y, double value) {
    res.x = res.x_lagrange = x;
    res.y = res.y_lagrange = y;
    res.value = res.upper = value;
    res.lambda = 0.0;
    res.converged = true;
    return res;
  };

  if (variation <= 1e-15 * (1.0 + g.norm() * (1.0 + set.diameter()))) {
    const Vec c = set.center();
    return finish_trivial(c, c, 0.0);
  }
  if (r == 0.0) {
    if (stacked_injective(problem)) {
      const Vec c = set.center();
      return finish_trivial(c, c, 0.0);
    }
    return equality_dual(problem, options.max_iter, scale);
  }
  if (pair_affinity(problem, top.point, bottom.point, nullptr) >= -r)
    return finish_trivial(top.point, bottom.point, variation);
  res.constraint_active = true;

  // Lagrangian subproblem at multiplier lambda, warm-started at z.
  Vec z(2 * n);
  z << top.point, bottom.point;
  const Domain dom = pair_domain(set);
  struct Probe {
    Vec z;
    double objective;  // g^T (x - y)
    double residual;   // h(z) + r
    double bound;      // certified upper bound on the Lagrangian maximum
  };
  auto solve_at = [&](double lambda) {
    const SmoothFn f = [&](const Vec& w, Vec* grad) {
      const double h = pair_affinity(problem, w.head(n), w.tail(n), grad);
      if (grad) {
        *grad *= lambda;
        grad->head(n) += g;
        grad->tail(n) -= g;
      }
      return g.dot(w.head(n) - w.tail(n)) + lambda * (h + r);
    };
    ConcaveMaxOptions opts;
    opts.tol_abs = 1e-3 * kDualTol * scale;
    opts.tol_rel = 0.0;
    const auto sol = maximize_concave(dom, f, z, opts);
    z = sol.x;
    Probe p;
    p.z = sol.x;
    p.objective = g.dot(sol.x.head(n) - sol.x.tail(n));
    p.residual = pair_affinity(problem, sol.x.head(n), sol.x.tail(n), nullptr) + r;
    p.bound = sol.value + sol.fw_gap;
    return p;
  };

  // Feasible reference: the diagonal pair has affinity 1.
  Vec best_feasible(2 * n);
  const Vec c = set.center();
  best_feasible << c, c;
  double best_value = 0.0;
  res.upper = variation;
  res.x_lagrange = top.point;
  res.y_lagrange = bottom.point;

  auto consider_feasible = [&](const Vec& w, double value) {
    if (value > best_value) {
      best_value = value;
      best_feasible = w;
    }
  };
  // Largest feasible point on the segment from a feasible point to an
  // infeasible one (the constraint is concave along it).
  auto segment_search = [&](const Vec& feasible, const Vec& infeasible) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 100 && hi - lo > 1e-16; ++i) {
      const double t = 0.5 * (lo + hi);
      const Vec w = feasible + t * (infeasible - feasible);
      if (pair_affinity(problem, w.head(n), w.tail(n), nullptr) >= -r)
        lo = t;
      else
        hi = t;
    }
    const Vec w = feasible + lo * (infeasible - feasible);
    consider_feasible(w, g.dot(w.head(n) - w.tail(n)));
  };
  auto record = [&](double lambda, const Probe& p) {
    const double bound = p.bound;
    if (bound < res.upper) {
      res.upper = bound;
      res.lambda = lambda;
      res.x_lagrange = p.z.head(n);
      res.y_lagrange = p.z.tail(n);
    }
    if (p.residual >= 0.0)
      consider_feasible(p.z, p.objective);
    else
      segment_search(best_feasible, p.z);
  };

  int iterations = 0;
  double lam = variation / r;
  double lam_feasible = kInf, lam_infeasible = 0.0;
  auto step = [&](double lambda) {
    const Probe p = solve_at(lambda);
    record(lambda, p);
    if (p.residual >= 0.0)
      lam_feasible = std::min(lam_feasible, lambda);
    else
      lam_infeasible = std::max(lam_infeasible, lambda);
    ++iterations;
    return p.residual >= 0.0;
  };

  // Bracket.
  if (step(lam)) {
    for (int i = 0; i < 60 && iterations < options.max_iter; ++i) {
      lam /= 4.0;
      if (!step(lam)) break;
    }
  } else {
    for (int i = 0; i < 200 && iterations < options.max_iter; ++i) {
      lam *= 4.0;
      if (step(lam)) break;
    }
  }
  // Geometric bisection on the multiplier.
  while (iterations < options.max_iter && res.upper - best_value > kDualTol * scale) {
    if (!std::isfinite(lam_feasible)) break;
    const double next =
        lam_infeasible > 0 ? std::sqrt(lam_feasible * lam_infeasible) : 0.25 * lam_feasible;
    if (lam_infeasible > 0 && lam_feasible / lam_infeasible - 1.0 < 1e-15) break;
    step(next);
  }

  res.x = best_feasible.head(n);
  res.y = best_feasible.tail(n);
  res.value = best_value;
  res.upper = std::max(res.upper, best_value);
  res.iterations = iterations;
  res.converged = res.upper - best_value <= 1e3 * kDualTol * scale;
  return res;
}

SaddleSolution minimize_outer(const EstimationProblem& problem, double r,
                              const SolverOptions& options) {
  if (!(r >= 0) || !std::isfinite(r)) throw InvalidInput("r must be finite and nonnegative");
  const DualResult dual = hellinger_dual(problem, r, options);
  const double tol = options.tol_rel * (1.0 + std::abs(dual.value));

  SaddleSolution best;
  best.r = r;
  best.dual = dual.value;
  best.x_bar = dual.x;
  best.y_bar = dual.y;
  best.upper = kInf;
  best.gap = kInf;

  auto accept = [&](const TestFunction& phi, double alpha, const OuterEvaluation& ev) {
    if (!(ev.upper < best.upper)) return;
    best.phi = phi;
    best.alpha = alpha;
    best.upper = ev.upper;
    best.gap = ev.upper - dual.value;
    best.x_u = ev.x;
    best.y_v = ev.y;
    best.U = ev.U;
    best.V = ev.V;
    best.inner_gap = std::max(ev.gap_u, ev.gap_v);
  };

  // Warm start from the multiplier of the dual: alpha = lambda / 2 and phi the
  // scaled half log-likelihood ratio at the Lagrangian maximizers.
  TestFunction phi0;
  double alpha0;
  if (dual.lambda > 0) {
    alpha0 = 0.5 * dual.lambda;
    phi0 = pair_test_function(problem, dual.x_lagrange, dual.y_lagrange, alpha0);
  } else {
    alpha0 = r > 0 ? tol / (4.0 * r) : 1.0;
    phi0 = problem.family_spec().zero_test_function();
  }
  accept(phi0, alpha0, outer_value(problem, phi0, alpha0, r, options));
  int iterations = 0;

  if (best.gap > tol) {
    const SubgradFn f = [&](const Vec& v, Vec& sub) {
      const TestFunction phi = unflatten(problem, v);
      const double alpha = std::exp(v[v.size() - 1]);
      sub.setZero(v.size());
      if (!(alpha > 0) || !std::isfinite(alpha)) return kInf;
      const OuterEvaluation ev = outer_value(problem, phi, alpha, r, options);
      if (!std::isfinite(ev.value)) return kInf;
      accept(phi, alpha, ev);
      sub = flatten(ev.grad_phi, alpha * ev.grad_alpha);
      return ev.value;
    };
    BundleOptions bopts;
    bopts.max_iter = options.max_iter;
    bopts.tol = 1e-3 * tol;
    const auto run = minimize_bundle(f, flatten(best.phi, std::log(best.alpha)), bopts,
                                     [&](const Vec&, double) { return best.gap <= tol; });
    iterations = run.iterations;
  }
  best.iterations = iterations + dual.iterations;
  best.gap = std::max(0.0, best.upper - dual.value);
  best.certified = best.gap <= tol;
  if (!best.certified)
    throw SolverCapReached("outer minimization stopped with gap " + std::to_string(best.gap) +
                               " above tolerance " + std::to_string(tol),
                           best);
  return best;
}

double phi_star(const EstimationProblem& problem, double r, const SolverOptions& options) {
  return 0.5 * hellinger_dual(problem, r, options).value;
}

bool ConcavityReport::passed() const {
  return nonnegative && monotone && scaling &&
         std::all_of(triples.begin(), triples.end(), [](const auto& t) { return t.passed; });
}

ConcavityReport phi_star_concavity_check(const EstimationProblem& problem,
                                         const std::vector<double>& r_list,
                                         const SolverOptions& options) {
  constexpr double kTol = 1e-6;
  ConcavityReport rep;
  rep.r = r_list;
  for (double r : r_list) rep.phi_star.push_back(phi_star(problem, r, options));
  const auto& v = rep.phi_star;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < -kTol) rep.nonnegative = false;
    if (i > 0 && v[i] < v[i - 1] - kTol) rep.monotone = false;
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (r_list[j] > 0 && v[i] < (r_list[i] / r_list[j]) * v[j] - kTol) rep.scaling = false;
  }
  for (std::size_t i = 0; i + 2 < v.size(); ++i) {
    ConcavityTriple t{r_list[i], r_list[i + 1], r_list[i + 2], true};
    const double span = r_list[i + 2] - r_list[i];
    if (span > 0) {
      const double w = (r_list[i + 1] - r_list[i]) / span;
      t.passed = v[i + 1] >= (1.0 - w) * v[i] + w * v[i + 2] - kTol;
    }
    rep.triples.push_back(t);
  }
  return rep;
}

}  // namespace affine_minimax

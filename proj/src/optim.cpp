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

#include "affine_minimax/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "affine_minimax/signal_sets.hpp"

namespace affine_minimax {

namespace {

constexpr double kStepMin = 1e-30;
constexpr double kStepMax = 1e30;
constexpr int kNonmonotoneMemory = 10;
constexpr double kArmijo = 1e-4;

}  // namespace

ConcaveMaxResult maximize_concave(const Domain& domain, const SmoothFn& f, const Vec& x0,
                                  const ConcaveMaxOptions& options) {
  ConcaveMaxResult best;
  Vec x = domain.project(x0);
  Vec g(x.size());
  double fx = f(x, &g);
  if (!std::isfinite(fx)) throw SolverError("concave maximization started at a point where f is not finite");

  best.x = x;
  best.value = fx;
  best.fw_gap = std::numeric_limits<double>::infinity();

  double step = 1.0;
  {
    const double probe = (domain.project(x + g) - x).lpNorm<Eigen::Infinity>();
    step = probe > 0 ? std::clamp(1.0 / probe, kStepMin, kStepMax) : 1.0;
  }
  std::deque<double> history{fx};

  for (int it = 0; it < options.max_iter; ++it) {
    const Vec v = domain.lin_max(g);
    const double gap = std::max(0.0, g.dot(v - x));
    if (fx >= best.value || it == 0) {
      best.x = x;
      best.value = fx;
      best.fw_gap = gap;
    }
    best.iterations = it;
    if (gap <= options.tol_abs + options.tol_rel * std::abs(fx)) {
      best.x = x;
      best.value = fx;
      best.fw_gap = gap;
      best.converged = true;
      return best;
    }

    Vec d = domain.project(x + step * g) - x;
    double slope = g.dot(d);
    if (!(slope > 0)) {
      // Projected step collapsed; fall back to the Frank-Wolfe direction.
      d = v - x;
      slope = g.dot(d);
      if (!(slope > 0)) {
        best.converged = true;
        return best;
      }
    }
    const double reference = *std::min_element(history.begin(), history.end());

    double t = 1.0;
    Vec xn(x.size()), gn(x.size());
    double fn = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 80; ++ls) {
      xn = x + t * d;
      fn = f(xn, &gn);
      if (std::isfinite(fn) && fn >= reference + kArmijo * t * slope) {
        accepted = true;
        break;
      }
      double tq = 0.5 * t;
      if (std::isfinite(fn)) {
        const double denom = 2.0 * (fx + t * slope - fn);
        if (denom > 0) tq = slope * t * t / denom;
      }
      t = (tq >= 0.1 * t && tq <= 0.9 * t) ? tq : 0.5 * t;
    }
    if (!accepted) {
      // No ascent possible at working precision.
      best.converged = best.fw_gap <= 1e3 * (options.tol_abs + options.tol_rel * std::abs(fx));
      return best;
    }

    const Vec s = xn - x;
    const double sty = -s.dot(gn - g);
    step = sty > 0 ? std::clamp(s.squaredNorm() / sty, kStepMin, kStepMax) : kStepMax;
    x = xn;
    fx = fn;
    g = gn;
    history.push_back(fx);
    if (static_cast<int>(history.size()) > kNonmonotoneMemory) history.pop_front();
  }
  return best;
}

FrankWolfeResult minimize_quadratic_fw(const SmoothFn& f,
                                       const std::function<Vec(const Vec&)>& vertex_oracle,
                                       const Vec& start_vertex, const FrankWolfeOptions& options) {
  struct Atom {
    Vec v;
    double w;
  };
  std::vector<Atom> active{{start_vertex, 1.0}};
  Vec x = start_vertex;
  Vec g(x.size());
  double fx = f(x, &g);

  auto same = [](const Vec& a, const Vec& b) {
    const double scale = 1.0 + std::max(a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>());
    return (a - b).lpNorm<Eigen::Infinity>() <= 1e-14 * scale;
  };

  FrankWolfeResult res;
  for (int it = 0; it < options.max_iter; ++it) {
    res.iterations = it;
    const Vec s = vertex_oracle(g);
    const Vec d_fw = s - x;
    const double gap = -g.dot(d_fw);
    res.fw_gap = std::max(0.0, gap);
    if (gap <= options.tol) {
      res.converged = true;
      break;
    }

    std::size_t away = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < active.size(); ++i) {
      const double val = g.dot(active[i].v);
      if (val > worst) {
        worst = val;
        away = i;
      }
    }
    const Vec d_away = x - active[away].v;
    const bool fw_step = gap >= -g.dot(d_away) || active.size() == 1;
    const Vec& d = fw_step ? d_fw : d_away;
    const double gmax =
        fw_step ? 1.0 : active[away].w / std::max(1.0 - active[away].w, 1e-300);

    const double slope = g.dot(d);
    const double f_full = f(x + d, nullptr);
    const double curvature = 2.0 * (f_full - fx - slope);
    double gamma = curvature > 0 ? -slope / curvature : gmax;
    gamma = std::clamp(gamma, 0.0, gmax);
    if (gamma <= 0) {
      res.converged = gap <= 1e3 * options.tol;
      break;
    }

    if (fw_step) {
      for (auto& a : active) a.w *= (1.0 - gamma);
      bool merged = false;
      for (auto& a : active) {
        if (same(a.v, s)) {
          a.w += gamma;
          merged = true;
          break;
        }
      }
      if (!merged) active.push_back({s, gamma});
      if (gamma >= 1.0) active = {{s, 1.0}};
    } else {
      for (auto& a : active) a.w *= (1.0 + gamma);
      active[away].w -= gamma;
      if (gamma >= gmax) active.erase(active.begin() + static_cast<long>(away));
    }
    std::erase_if(active, [](const Atom& a) { return a.w <= 0.0; });

    double total = 0.0;
    for (const auto& a : active) total += a.w;
    x.setZero();
    for (auto& a : active) {
      a.w /= total;
      x += a.w * a.v;
    }
    fx = f(x, &g);
  }
  res.x = x;
  res.value = fx;
  return res;
}

Vec solve_simplex_qp(const Mat& G, const Vec& b, double u, const Vec& warm) {
  const int m = static_cast<int>(G.cols());
  const Mat H = (G.transpose() * G) / u;
  double lip = 0.0;
  if (m > 0) {
    Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
    lip = es.eigenvalues().maxCoeff();
  }
  if (!(lip > 0)) {
    // Purely linear: put all mass on the best entry of b.
    Vec lam = Vec::Zero(m);
    Eigen::Index i = 0;
    b.maxCoeff(&i);
    lam[i] = 1.0;
    return lam;
  }

  auto q = [&](const Vec& l) { return 0.5 * l.dot(H * l) - b.dot(l); };
  Vec lam = (warm.size() == m && warm.minCoeff() >= 0 && std::abs(warm.sum() - 1) < 1e-9)
                ? warm
                : Vec::Constant(m, 1.0 / m);
  Vec y = lam;
  double t = 1.0;
  double q_lam = q(lam);
  const double scale = 1.0 + b.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < 20000; ++it) {
    const Vec grad_y = H * y - b;
    const Vec next = project_simplex(y - grad_y / lip, 1.0);
    const double q_next = q(next);
    if (q_next > q_lam) {
      // restart momentum
      y = lam;
      t = 1.0;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - lam);
    t = t_next;
    lam = next;
    q_lam = q_next;
    if (it % 10 == 0) {
      const Vec grad = H * lam - b;
      const double gap = grad.dot(lam) - grad.minCoeff();
      if (gap <= 1e-16 * scale) break;
    }
  }
  return lam;
}

BundleResult minimize_bundle(const SubgradFn& f, const Vec& x0, const BundleOptions& options,
                             const std::function<bool(const Vec&, double)>& stop) {
  struct Cut {
    Vec y;
    double fy;
    Vec g;
  };
  BundleResult res;
  Vec center = x0;
  Vec g0(x0.size());
  double f_center = f(center, g0);
  res.evaluations = 1;
  res.x = center;
  res.value = f_center;
  if (stop && stop(center, f_center)) {
    res.converged = true;
    return res;
  }

  std::vector<Cut> cuts{{center, f_center, g0}};
  const double gnorm = g0.norm();
  double u = gnorm > 0 ? gnorm / (options.initial_step * (1.0 + x0.norm())) : 1.0;
  Vec lam_warm;

  for (int it = 1; it <= options.max_iter; ++it) {
    res.iterations = it;
    const int m = static_cast<int>(cuts.size());
    Mat G(center.size(), m);
    Vec b(m);
    for (int j = 0; j < m; ++j) {
      G.col(j) = cuts[j].g;
      // value at the center of cut j's linearization, relative to f_center
      b[j] = cuts[j].fy + cuts[j].g.dot(center - cuts[j].y) - f_center;
    }
    Vec lam = solve_simplex_qp(G, b, u, lam_warm);
    const Vec dir = -(G * lam) / u;
    const Vec cand = center + dir;
    double model = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) model = std::max(model, b[j] + cuts[j].g.dot(dir));
    const double predicted = -model;  // f_center - model(cand)
    if (predicted <= options.tol) {
      res.converged = true;
      break;
    }

    Vec gc(center.size());
    const double fc = f(cand, gc);
    ++res.evaluations;
    const bool serious = std::isfinite(fc) && f_center - fc >= options.serious_fraction * predicted;
    if (serious) {
      const double ratio = (f_center - fc) / predicted;
      center = cand;
      f_center = fc;
      if (ratio > 0.8) u = std::max(u * 0.5, 1e-300);
    } else {
      u *= 1.5;
    }
    if (std::isfinite(fc)) cuts.push_back({cand, fc, gc});

    // Keep the cuts the subproblem used; fold the rest into one aggregate.
    if (static_cast<int>(cuts.size()) > options.max_cuts) {
      std::vector<Cut> kept;
      Vec agg_g = Vec::Zero(center.size());
      double agg_b = 0.0;
      for (int j = 0; j < m; ++j) {
        if (lam[j] > 1e-10) kept.push_back(cuts[j]);
        agg_g += lam[j] * cuts[j].g;
        agg_b += lam[j] * (cuts[j].fy + cuts[j].g.dot(res.x - cuts[j].y));
      }
      // aggregate linearization anchored at the previous center
      kept.push_back({res.x, agg_b, agg_g});
      for (std::size_t j = m; j < cuts.size(); ++j) kept.push_back(cuts[j]);
      cuts = std::move(kept);
      lam_warm.resize(0);
    } else {
      lam_warm = Vec::Zero(static_cast<int>(cuts.size()));
      lam_warm.head(m) = lam;
      lam_warm /= lam_warm.sum();
    }
    res.x = center;
    res.value = f_center;
    if (serious && stop && stop(center, f_center)) {
      res.converged = true;
      break;
    }
  }
  res.x = center;
  res.value = f_center;
  return res;
}

}  // namespace affine_minimax

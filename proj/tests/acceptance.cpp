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

// Acceptance checks. Each criterion prints diagnostics followed by one
// "PASS <name>" or "FAIL <name>" line; the exit status is nonzero if any
// selected criterion fails.
//
// Usage: acceptance [criterion ...]   (no argument runs all of them)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "affine_minimax/adaptive.hpp"
#include "affine_minimax/estimator.hpp"
#include "affine_minimax/gaussian.hpp"
#include "affine_minimax/pet.hpp"
#include "affine_minimax/risk_lab.hpp"
#include "affine_minimax/saddle.hpp"
#include "affine_minimax/table1.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace affine_minimax;
using namespace instances;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel_diff(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

// Collects failures of one criterion.
struct Verdict {
  int failures = 0;
  void check(bool ok, const char* message) {
    if (ok) return;
    ++failures;
    std::printf("  mismatch: %s\n", message);
  }
  template <class First, class... Rest>
  void check(bool ok, const char* fmt, First first, Rest... rest) {
    if (ok) return;
    ++failures;
    std::printf("  mismatch: ");
    std::printf(fmt, first, rest...);
    std::printf("\n");
  }
};

bool table1() {
  Verdict v;
  const auto t0 = Clock::now();
  const std::vector<Table1Row> rows = table1_reproduce();
  const double elapsed = seconds_since(t0);
  const auto& ref = table1_reference();
  std::printf("  %-6s %-5s %-10s %-10s %-10s %-10s %-10s %-10s %-6s %-9s\n", "eps", "L", "upper", "published",
              "lower", "published", "ratio", "published", "theta", "published");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Table1Row& r = rows[i];
    const Table1Row& p = ref[i];
    std::printf("  %-6g %-5d %-10.3e %-10.3e %-10.3e %-10.3e %-10.3f %-10.2f %-6.3f %-6.2f\n", r.epsilon, r.L,
                r.upper, p.upper, r.lower, p.lower, r.ratio, p.ratio, r.theta, p.theta);
    v.check(r.certified, "cell (%g, %d) not certified", r.epsilon, r.L);
    v.check(rel_diff(r.upper, p.upper) <= 0.05, "cell (%g, %d) upper %.4g vs %.3g (%.1f%%)", r.epsilon, r.L,
            r.upper, p.upper, 100 * rel_diff(r.upper, p.upper));
    v.check(rel_diff(r.lower, p.lower) <= 0.05, "cell (%g, %d) lower %.4g vs %.3g (%.1f%%)", r.epsilon, r.L,
            r.lower, p.lower, 100 * rel_diff(r.lower, p.lower));
    v.check(rel_diff(r.ratio, p.ratio) <= 0.05, "cell (%g, %d) ratio %.4g vs %.3g (%.1f%%)", r.epsilon, r.L,
            r.ratio, p.ratio, 100 * rel_diff(r.ratio, p.ratio));
    v.check(std::abs(r.theta - p.theta) <= 5e-3, "cell (%g, %d) theta %.5f vs %.2f", r.epsilon, r.L, r.theta,
            p.theta);
    if (r.epsilon == 0.01 && r.L == 100)
      std::printf("  exempt delta cell (0.01, 100): computed %.3e, published %.2e\n", r.delta, p.delta);
  }
  std::printf("  runtime %.2f s\n", elapsed);
  v.check(elapsed <= 60.0, "runtime %.1f s exceeds one minute", elapsed);
  return v.failures == 0;
}

std::vector<EstimationProblem> sandwich_instances() {
  std::vector<EstimationProblem> out;
  Philox rng(2024);
  for (const char* fam : {"bernoulli", "poisson", "gaussian", "product"})
    for (int t = 0; t < 10; ++t) out.push_back(random_instance(fam, rng));
  return out;
}

bool theta_sandwich() {
  Verdict v;
  int i = 0;
  double worst_ratio = 0.0;
  for (const EstimationProblem& p : sandwich_instances()) {
    const AffineEstimator est = construct(p);
    const double lower = lower_bound_hellinger(p);
    const double theta = theta_epsilon(p.epsilon);
    v.check(lower <= est.risk_bound + 1e-9, "instance %d: lower %.6g above risk bound %.6g", i, lower,
            est.risk_bound);
    v.check(est.risk_bound <= theta * lower + 1e-4, "instance %d: risk bound %.6g above theta * lower %.6g", i,
            est.risk_bound, theta * lower);
    v.check(est.gap <= 1e-6 * (1 + std::abs(est.dual)), "instance %d: gap %.3g", i, est.gap);
    if (lower > 0) worst_ratio = std::max(worst_ratio, est.risk_bound / (theta * lower));
    ++i;
  }
  std::printf("  %d instances, largest risk_bound / (theta * lower) = %.4f\n", i, worst_ratio);
  return v.failures == 0;
}

bool gaussian_equivalence() {
  Verdict v;
  Philox rng(77);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const GaussianProblem gp = random_gaussian_box(rng);
    const AffineEstimator est = construct_gaussian(gp);
    const double half_tp = 0.5 * gaussian_two_point_value(gp, 2 * erfinv_tail(gp.epsilon / 2));
    const double rel = std::abs(est.risk_bound - half_tp) / std::max(1e-300, std::abs(half_tp));
    worst = std::max(worst, rel);
    v.check(est.certified, "box %d not certified", t);
    v.check(rel <= 1e-6, "box %d: risk bound %.10g vs two-point %.10g", t, est.risk_bound, half_tp);
  }
  std::printf("  10 boxes, largest relative difference %.3g\n", worst);
  for (double eps : {0.05, 0.01, 0.001}) {
    const double sharp = erfinv_tail(eps / 2) / erfinv_tail(eps);
    std::printf("  eps %-6g ErfInv(eps/2)/ErfInv(eps) = %.5f, psi = %.5f\n", eps, sharp, psi_epsilon(eps));
    v.check(sharp < psi_epsilon(eps), "sharper factor not below psi at eps %g", eps);
  }
  return v.failures == 0;
}

bool dual_vs_primal() {
  Verdict v;
  int i = 0;
  double worst = 0.0;
  for (const EstimationProblem& p : sandwich_instances()) {
    const AffineEstimator est = construct(p);
    const double tol = SolverOptions{}.tol_rel * (1 + std::abs(est.dual));
    worst = std::max(worst, std::abs(est.upper - est.dual));
    v.check(std::abs(est.upper - est.dual) <= tol, "instance %d: outer %.10g dual %.10g", i, est.upper, est.dual);
    ++i;
  }
  std::printf("  %d instances, largest |outer - dual| = %.3g\n", i, worst);
  Philox rng(91);
  const std::vector<double> grid = {0.0, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
  for (const char* fam : {"bernoulli", "poisson", "gaussian", "product"})
    for (int t = 0; t < 2; ++t) {
      const EstimationProblem p = random_instance(fam, rng);
      const ConcavityReport rep = phi_star_concavity_check(p, grid);
      v.check(rep.nonnegative, "%s instance %d: Phi_* negative", fam, t);
      v.check(rep.monotone, "%s instance %d: Phi_* not monotone", fam, t);
      v.check(rep.scaling, "%s instance %d: Phi_*(t r) < t Phi_*(r)", fam, t);
    }
  std::printf("  Phi_* grid checks on 8 instances over %zu radii\n", grid.size());
  return v.failures == 0;
}

// Extremal point plus ten random points of the set.
std::vector<Vec> coverage_points(const Vec& x_bar, const SignalSet& set, Philox& rng) {
  std::vector<Vec> xs{x_bar};
  for (int i = 0; i < 10; ++i) xs.push_back(set.random_point(rng));
  return xs;
}

void coverage_check(Verdict& v, const char* label, const RiskReport& rep, double eps) {
  std::printf("  %-28s worst frequency %.5f, worst Wilson upper %.5f (eps %g)\n", label, rep.worst_frequency,
              rep.worst_wilson_upper, eps);
  for (std::size_t j = 0; j < rep.points.size(); ++j) {
    const PointRisk& pr = rep.points[j];
    v.check(pr.frequency < eps, "%s point %zu: frequency %.5f not below eps %g", label, j, pr.frequency, eps);
    v.check(pr.wilson_upper < kCoverageSlack * eps, "%s point %zu: Wilson upper %.5f not below %.4g", label, j,
            pr.wilson_upper, kCoverageSlack * eps);
  }
}

bool mc_coverage() {
  Verdict v;
  const auto t0 = Clock::now();
  MonteCarloOptions mo;
  mo.n_reps = 100000;
  Philox rng(404);

  // Generic pipeline.
  int idx = 0;
  for (const char* fam : {"bernoulli", "poisson", "gaussian", "product"}) {
    const EstimationProblem p = random_instance(fam, rng);
    const AffineEstimator est = construct(p);
    v.check(est.certified, "generic %s instance not certified", fam);
    const Vec x_bar = hellinger_dual(p, std::log(2 / p.epsilon)).x;
    mo.seed = 1000 + idx++;
    coverage_check(v, (std::string("generic ") + fam).c_str(), mc_risk(p, est, coverage_points(x_bar, p.set, rng), mo),
                   p.epsilon);
  }
  const EstimationProblem bern = bernoulli_problem(0.05, 100);
  {
    const AffineEstimator est = construct(bern);
    const Vec x_bar = hellinger_dual(bern, std::log(2 / bern.epsilon)).x;
    mo.seed = 1100;
    coverage_check(v, "generic bernoulli L=100", mc_risk(bern, est, coverage_points(x_bar, bern.set, rng), mo),
                   bern.epsilon);
  }

  // Gaussian closed form.
  for (int t = 0; t < 3; ++t) {
    const GaussianProblem gp = random_gaussian_box(rng);
    const AffineEstimator est = construct_gaussian(gp);
    v.check(est.certified, "gaussian box %d not certified", t);
    const double R = 2 * erfinv_tail(gp.epsilon / 2);
    const EstimationProblem p = gp.generic();
    const Vec x_bar = hellinger_dual(p, R * R / 8).x;
    // Exact violation probability at the extremal point: the error is normal
    // with mean equal to the bias and standard deviation |phi|.
    const Vec s = est.phi.parts[0].head(gp.A.rows());
    const double bias = s.dot(gp.A * x_bar) + est.c - gp.g.dot(x_bar);
    const double sd = s.norm();
    const double exact = sd > 0 ? oracle::normal_tail((est.risk_bound - bias) / sd) +
                                      oracle::normal_tail((est.risk_bound + bias) / sd)
                                : 0.0;
    std::printf("  gaussian box %d: exact violation probability at x_bar %.6f\n", t, exact);
    mo.seed = 2000 + t;
    coverage_check(v, ("gaussian box " + std::to_string(t)).c_str(),
                   mc_risk(p, est, coverage_points(x_bar, gp.set, rng), mo), gp.epsilon);
  }

  // Emission tomography.
  {
    const PetModel m = pet_demo_model(2);
    const AffineEstimator est = pet_construct(m);
    v.check(est.certified, "PET demo not certified");
    const EstimationProblem p = m.generic();
    const Vec x_bar = hellinger_dual(p, std::log(2 / m.epsilon)).x;
    mo.seed = 3000;
    coverage_check(v, "pet 2x2 phantom", mc_risk(p, est, coverage_points(x_bar, m.set, rng), mo), m.epsilon);
  }

  // Adaptive levels, each at confidence eps / K on its own set.
  {
    NestedProblem np;
    np.base = gaussian_box(Mat::Identity(1, 1), vec({-4}), vec({4}), vec({1}), 0.05);
    for (double h : {0.25, 1.0, 4.0}) np.sets.push_back(SignalSet::interval(-h, h));
    const AdaptiveEstimator ad = build_levels(np);
    const int K = np.levels();
    for (int k = 0; k < K; ++k) {
      const EstimationProblem lp = np.level_problem(k);
      const AffineEstimator& est = ad.levels[k].estimator;
      v.check(est.certified, "adaptive level %d not certified", k + 1);
      const Vec x_bar = hellinger_dual(lp, std::log(2.0 * K / lp.epsilon)).x;
      mo.seed = 4000 + k;
      coverage_check(v, ("adaptive level " + std::to_string(k + 1)).c_str(),
                     mc_risk(lp, est, coverage_points(x_bar, lp.set, rng), mo), lp.epsilon);
    }
  }
  const double elapsed = seconds_since(t0);
  std::printf("  runtime %.1f s\n", elapsed);
  v.check(elapsed <= 600.0, "runtime %.0f s exceeds ten minutes", elapsed);
  return v.failures == 0;
}

bool pet_equivalence() {
  Verdict v;
  Philox rng(4);
  for (int t = 0; t < 5; ++t) {
    const PetModel m = random_pet(rng);
    const AffineEstimator pet = pet_construct(m);
    const AffineEstimator gen = construct(m.generic());
    const double rel = std::abs(pet.risk_bound - gen.risk_bound) / gen.risk_bound;
    std::printf("  model %d (n=%d, L=%d): pet %.10g generic %.10g relative %.2e\n", t, m.voxels(), m.bins(),
                pet.risk_bound, gen.risk_bound, rel);
    v.check(pet.certified && gen.certified, "model %d not certified", t);
    v.check(rel <= 1e-6, "model %d differs by %.3g relative", t, rel);
  }
  return v.failures == 0;
}

bool adaptive_guarantee() {
  Verdict v;
  v.check(vartheta(1, 0.05) == 3.0, "vartheta(1) = %.17g", vartheta(1, 0.05));
  NestedProblem np;
  np.base = gaussian_box(Mat::Identity(1, 1), vec({-4}), vec({4}), vec({1}), 0.05);
  for (double h : {0.25, 1.0, 4.0}) np.sets.push_back(SignalSet::interval(-h, h));
  const AdaptiveEstimator ad = build_levels(np);
  const int K = np.levels();
  const EstimationProblem& base = np.base;
  const Simulator simulate = [&](const Vec& x, Philox& rng) {
    std::vector<Vec> obs;
    for (const auto& grp : base.groups) {
      const Vec mu = grp.map.apply(x);
      for (int c = 0; c < grp.count; ++c) obs.push_back(grp.family.sample(mu, rng));
    }
    return select_and_estimate(ad, obs).value;
  };
  MonteCarloOptions mo;
  mo.n_reps = 100000;
  Philox rng(55);
  for (int k = 0; k < K; ++k) {
    const double threshold = ad.vartheta * ad.levels[k].phi_star + 3 * ad.delta;
    const EstimationProblem lp = np.level_problem(k);
    std::vector<Vec> xs{hellinger_dual(lp, std::log(2.0 * K / lp.epsilon)).x};
    for (int i = 0; i < 10; ++i) xs.push_back(np.sets[k].random_point(rng));
    mo.seed = 500 + k;
    const RiskReport rep = mc_risk_custom(simulate, base.g, xs, threshold, base.epsilon, mo);
    std::printf("  level %d: bound %.6g, worst frequency %.5f, worst Wilson upper %.5f\n", k + 1, threshold,
                rep.worst_frequency, rep.worst_wilson_upper);
    for (const PointRisk& pr : rep.points)
      v.check(pr.frequency < base.epsilon, "level %d: frequency %.5f", k + 1, pr.frequency);
  }
  std::printf("  vartheta(K=%d) = %.6f, vartheta(1) = %.17g\n", K, ad.vartheta, vartheta(1, 0.05));
  return v.failures == 0;
}

bool oracle_suite() {
  Verdict v;
  Philox rng(123);
  const ChannelFamily poisson = ChannelFamily::poisson();
  const ChannelFamily gauss1 = ChannelFamily::gaussian_identity(1);
  int checks = 0;

  // Affinities against series and quadrature.
  for (int t = 0; t < 10; ++t) {
    const double mu = unif(rng, 0.1, 20), nu = unif(rng, 0.1, 20);
    const double closed = std::exp(poisson.affinity_log(vec({mu}), vec({nu})));
    v.check(std::abs(closed - oracle::poisson_affinity_series(mu, nu)) <= 1e-9, "poisson affinity at (%g, %g)",
            mu, nu);
    const double a = unif(rng, -3, 3), b = unif(rng, -3, 3);
    const double g_closed = std::exp(gauss1.affinity_log(vec({a}), vec({b})));
    v.check(std::abs(g_closed - oracle::gaussian_affinity_quadrature(a, b)) <= 1e-9, "gaussian affinity at (%g, %g)",
            a, b);
    const ChannelFamily disc = ChannelFamily::discrete(4);
    Vec p = random_vec(rng, 4, 0.05, 1.0), q = random_vec(rng, 4, 0.05, 1.0);
    p /= p.sum();
    q /= q.sum();
    const double d_closed = std::exp(disc.affinity_log(p, q));
    v.check(std::abs(d_closed - (p.array() * q.array()).sqrt().sum()) <= 1e-12, "discrete affinity");
    const double s = unif(rng, -0.5, 0.5), c = unif(rng, -1, 1);
    v.check(std::abs(poisson.lem(vec({s, c}), vec({mu})) - oracle::poisson_lem_series(s, c, mu)) <= 1e-9,
            "poisson lem");
    v.check(std::abs(gauss1.lem(vec({s, c}), vec({a})) - oracle::gaussian_lem_quadrature(s, c, a)) <= 1e-9,
            "gaussian lem");
    checks += 5;
  }

  // Convexity in phi and concavity in mu (affine for Poisson and Gaussian).
  for (int t = 0; t < 50; ++t) {
    const ChannelFamily disc = ChannelFamily::discrete(3);
    const Vec f1 = random_vec(rng, 3, -2, 2), f2 = random_vec(rng, 3, -2, 2);
    Vec m1 = random_vec(rng, 3, 0.05, 1), m2 = random_vec(rng, 3, 0.05, 1);
    m1 /= m1.sum();
    m2 /= m2.sum();
    const double mid_phi = disc.lem(0.5 * (f1 + f2), m1);
    v.check(mid_phi <= 0.5 * (disc.lem(f1, m1) + disc.lem(f2, m1)) + 1e-12, "discrete lem not convex in phi");
    const double mid_mu = disc.lem(f1, 0.5 * (m1 + m2));
    v.check(mid_mu >= 0.5 * (disc.lem(f1, m1) + disc.lem(f1, m2)) - 1e-12, "discrete lem not concave in mu");
    const Vec pf1 = random_vec(rng, 2, -1, 1), pf2 = random_vec(rng, 2, -1, 1);
    const double r1 = unif(rng, 0.1, 10);
    v.check(poisson.lem(0.5 * (pf1 + pf2), vec({r1})) <=
                0.5 * (poisson.lem(pf1, vec({r1})) + poisson.lem(pf2, vec({r1}))) + 1e-12,
            "poisson lem not convex in phi");
    checks += 3;
  }

  // Gradients against central differences.
  for (int t = 0; t < 20; ++t) {
    const ChannelFamily fams[] = {ChannelFamily::discrete(3), poisson, ChannelFamily::gaussian_identity(2)};
    for (const ChannelFamily& fam : fams) {
      const Vec phi = random_vec(rng, fam.coef_dim(), -0.8, 0.8);
      Vec mu, nu;
      if (fam.kind() == FamilyKind::Discrete) {
        mu = random_vec(rng, 3, 0.1, 1);
        mu /= mu.sum();
        nu = random_vec(rng, 3, 0.1, 1);
        nu /= nu.sum();
      } else {
        mu = random_vec(rng, fam.param_dim(), 0.5, 5);
        nu = random_vec(rng, fam.param_dim(), 0.5, 5);
      }
      const double h = 1e-6;
      const Vec gmu = fam.lem_grad_mu(phi, mu), gphi = fam.lem_grad_phi(phi, mu);
      Vec ga, gb;
      fam.affinity_log_grad(mu, nu, ga, gb);
      // Discrete parameters stay on the simplex: use zero-sum directions.
      const bool simplex = fam.kind() == FamilyKind::Discrete;
      for (int i = 0; i + (simplex ? 1 : 0) < mu.size(); ++i) {
        Vec e = Vec::Zero(mu.size());
        e[i] = h;
        if (simplex) e[i + 1] = -h;
        const double fd = (fam.lem(phi, mu + e) - fam.lem(phi, mu - e)) / (2 * h);
        const double an = gmu.dot(e) / h;
        v.check(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(fd)), "lem mu-gradient");
        const double fa = (fam.affinity_log(mu + e, nu) - fam.affinity_log(mu - e, nu)) / (2 * h);
        const double aa = ga.dot(e) / h;
        v.check(std::abs(fa - aa) <= 1e-6 * std::max(1.0, std::abs(fa)), "affinity gradient");
        checks += 2;
      }
      for (int i = 0; i < phi.size(); ++i) {
        Vec e = Vec::Zero(phi.size());
        e[i] = h;
        const double fd = (fam.lem(phi + e, mu) - fam.lem(phi - e, mu)) / (2 * h);
        v.check(std::abs(fd - gphi[i]) <= 1e-6 * std::max(1.0, std::abs(fd)), "lem phi-gradient");
        ++checks;
      }
    }
  }

  // Binomial total variation against brute-force enumeration.
  for (int n : {1, 5, 20, 100})
    for (auto [p, q] : std::vector<std::pair<double, double>>{{0.5, 0.3}, {0.9, 0.2}, {0.52, 0.48}}) {
      double tv = 0.0;
      for (int k = 0; k <= n; ++k) tv += 0.5 * std::abs(oracle::binomial_pmf(n, k, p) - oracle::binomial_pmf(n, k, q));
      v.check(std::abs(binomial_tv(n, p, q) - tv) <= 1e-12, "binomial TV n=%d", n);
      ++checks;
    }

  // lin_max against vertex enumeration; projection properties.
  for (int t = 0; t < 30; ++t) {
    const int n = randint(rng, 1, 4);
    const SignalSet sets[] = {SignalSet::box(random_vec(rng, n, -2, 0), random_vec(rng, n, 0.1, 2)),
                              SignalSet::simplex(n, unif(rng, 0.5, 3))};
    for (const SignalSet& set : sets) {
      const Vec c = random_vec(rng, n, -1, 1);
      double best = -INFINITY;
      for (const Vec& vert : set.vertices()) best = std::max(best, c.dot(vert));
      const LinMax lm = set.lin_max(c);
      v.check(std::abs(lm.value - best) <= 1e-12 * (1 + std::abs(best)), "lin_max value");
      v.check(set.contains(lm.point), "lin_max point outside the set");
      const Vec z = random_vec(rng, n, -4, 4);
      const Vec pz = set.project(z);
      v.check(set.contains(pz), "projection outside the set");
      v.check((set.project(pz) - pz).norm() <= 1e-12, "projection not idempotent");
      for (const Vec& vert : set.vertices())
        v.check((z - pz).dot(vert - pz) <= 1e-9, "projection violates the obtuse-angle condition");
      checks += 5;
    }
  }
  std::printf("  %d oracle comparisons, %d mismatches\n", checks, v.failures);
  return v.failures == 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<bool()>>> criteria = {
      {"table1", table1},
      {"theta_sandwich", theta_sandwich},
      {"gaussian_equivalence", gaussian_equivalence},
      {"dual_vs_primal", dual_vs_primal},
      {"mc_coverage", mc_coverage},
      {"pet_equivalence", pet_equivalence},
      {"adaptive_guarantee", adaptive_guarantee},
      {"oracle_suite", oracle_suite},
  };
  std::vector<std::string> selected(argv + 1, argv + argc);
  if (selected.empty())
    for (const auto& c : criteria) selected.push_back(c.first);
  int failed = 0;
  for (const std::string& name : selected) {
    const auto it = std::find_if(criteria.begin(), criteria.end(), [&](const auto& c) { return c.first == name; });
    if (it == criteria.end()) {
      std::fprintf(stderr, "unknown criterion %s\n", name.c_str());
      return 2;
    }
    bool ok = false;
    try {
      ok = it->second();
    } catch (const std::exception& e) {
      std::printf("  exception: %s\n", e.what());
    }
    std::printf("%s %s\n", ok ? "PASS" : "FAIL", name.c_str());
    std::fflush(stdout);
    failed += !ok;
  }
  return failed == 0 ? 0 : 1;
}

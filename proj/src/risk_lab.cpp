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

#include "affine_minimax/risk_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace affine_minimax {

namespace {

/// Replications per work unit; fixed so that merged sums do not depend on
/// the thread count.
constexpr long kChunk = 4096;

struct Tally {
  long violations = 0;
  double abs_sum = 0.0;
  double abs_max = 0.0;
  std::vector<long> bins;
  long overflow = 0;
};

}  // namespace

double wilson_upper(long k, long n, double z) {
  if (n <= 0) throw InvalidInput("wilson_upper needs n > 0");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double center = p + z2 / (2.0 * nn);
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return std::min(1.0, (center + half) / (1.0 + z2 / nn));
}

bool RiskReport::all_below_epsilon() const {
  return std::all_of(points.begin(), points.end(),
                     [&](const PointRisk& p) { return p.frequency < epsilon; });
}

bool RiskReport::passed() const {
  return std::all_of(points.begin(), points.end(),
                     [&](const PointRisk& p) { return p.wilson_upper < kCoverageSlack * epsilon; });
}

RiskReport mc_risk_custom(const Simulator& simulate, const Vec& g, const std::vector<Vec>& x_list,
                          double threshold, double epsilon, const MonteCarloOptions& options) {
  if (options.n_reps < 1) throw InvalidInput("n_reps must be positive");
  RiskReport rep;
  rep.threshold = threshold;
  rep.epsilon = epsilon;
  rep.n_reps = options.n_reps;
  const int bins = std::max(1, options.histogram_bins);
  const double hist_hi = threshold > 0 ? 2.0 * threshold : 1.0;
  const long n_chunks = (options.n_reps + kChunk - 1) / kChunk;
  int threads = options.threads > 0 ? options.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(std::max<long>(1, n_chunks)));

  for (std::size_t j = 0; j < x_list.size(); ++j) {
    const Vec& x = x_list[j];
    const double truth = g.dot(x);
    std::vector<Tally> tallies(n_chunks);
    std::atomic<long> next{0};
    auto worker = [&]() {
      for (long c = next++; c < n_chunks; c = next++) {
        Tally t;
        t.bins.assign(bins, 0);
        const long begin = c * kChunk;
        const long end = std::min(options.n_reps, begin + kChunk);
        for (long i = begin; i < end; ++i) {
          Philox rng(options.seed, j, static_cast<std::uint32_t>(i));
          const double err = std::abs(simulate(x, rng) - truth);
          if (err > threshold) ++t.violations;
          t.abs_sum += err;
          t.abs_max = std::max(t.abs_max, err);
          const auto b = static_cast<long>(err / hist_hi * bins);
          if (b >= 0 && b < bins)
            ++t.bins[b];
          else
            ++t.overflow;
        }
        tallies[c] = std::move(t);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    PointRisk pr;
    pr.x = x;
    pr.truth = truth;
    pr.reps = options.n_reps;
    pr.histogram.hi = hist_hi;
    pr.histogram.counts.assign(bins, 0);
    double abs_sum = 0.0;
    for (const auto& t : tallies) {
      pr.violations += t.violations;
      abs_sum += t.abs_sum;
      pr.max_abs_error = std::max(pr.max_abs_error, t.abs_max);
      for (int b = 0; b < bins; ++b) pr.histogram.counts[b] += t.bins[b];
      pr.histogram.overflow += t.overflow;
    }
    pr.frequency = static_cast<double>(pr.violations) / static_cast<double>(pr.reps);
    pr.wilson_upper = wilson_upper(pr.violations, pr.reps);
    pr.mean_abs_error = abs_sum / static_cast<double>(pr.reps);
    rep.worst_frequency = std::max(rep.worst_frequency, pr.frequency);
    rep.worst_wilson_upper = std::max(rep.worst_wilson_upper, pr.wilson_upper);
    rep.points.push_back(std::move(pr));
  }
  return rep;
}

double sample_group_sum(const ChannelFamily& family, const Vec& phi, const Vec& mu, int count,
                        Philox& rng) {
  if (count == 1) return family.evaluate(phi, family.sample(mu, rng));
  switch (family.kind()) {
    case FamilyKind::Discrete: {
      // Multinomial counts by sequential binomials.
      long left = count;
      double mass = 1.0;
      double total = 0.0;
      for (int i = 0; i < mu.size() && left > 0; ++i) {
        long k = left;
        if (i + 1 < mu.size()) {
          const double p = std::clamp(mu[i] / mass, 0.0, 1.0);
          k = std::binomial_distribution<long>(left, p)(rng);
        }
        total += phi[i] * static_cast<double>(k);
        left -= k;
        mass -= mu[i];
      }
      return total;
    }
    case FamilyKind::Poisson: {
      const long s = std::poisson_distribution<long>(count * mu[0])(rng);
      return phi[0] * static_cast<double>(s) + count * phi[1];
    }
    case FamilyKind::Gaussian: {
      const int k = family.size();
      const Vec noise = family.sample(mu, rng) - mu;
      const Vec s = count * mu + std::sqrt(static_cast<double>(count)) * noise;
      return phi.head(k).dot(s) + count * phi[k];
    }
  }
  return 0.0;
}

RiskReport mc_risk(const EstimationProblem& problem, const AffineEstimator& estimator,
                   const std::vector<Vec>& x_list, const MonteCarloOptions& options,
                   double threshold) {
  if (static_cast<int>(estimator.phi.parts.size()) != problem.num_groups())
    throw InvalidInput("estimator does not match the problem's channel groups");
  for (std::size_t j = 0; j < x_list.size(); ++j)
    if (!problem.set.contains(x_list[j]))
      throw InvalidInput("point " + std::to_string(j) + " of the x list lies outside X");
  const Simulator sim = [&](const Vec& x, Philox& rng) {
    double total = estimator.c;
    for (int k = 0; k < problem.num_groups(); ++k) {
      const auto& grp = problem.groups[k];
      total += sample_group_sum(grp.family, estimator.phi.parts[k], grp.map.apply(x), grp.count, rng);
    }
    return total;
  };
  return mc_risk_custom(sim, problem.g, x_list, threshold >= 0 ? threshold : estimator.risk_bound,
                        problem.epsilon, options);
}

double lower_bound_hellinger(const EstimationProblem& problem, const SolverOptions& options) {
  if (!(problem.epsilon > 0.0 && problem.epsilon < 0.25))
    throw InvalidInput("lower bound requires 0 < epsilon < 1/4");
  return 0.5 * hellinger_dual(problem, 0.5 * std::log(1.0 / (4.0 * problem.epsilon)), options).value;
}

double binomial_tv(int n, double p, double q) {
  if (n < 0 || !(p >= 0 && p <= 1) || !(q >= 0 && q <= 1))
    throw InvalidInput("binomial_tv needs n >= 0 and probabilities in [0, 1]");
  auto log_pmf = [n](int k, double prob) {
    const double choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    const double a = k > 0 ? k * std::log(prob) : 0.0;
    const double b = n - k > 0 ? (n - k) * std::log1p(-prob) : 0.0;
    return choose + a + b;
  };
  double tv = 0.0;
  for (int k = 0; k <= n; ++k) tv += std::abs(std::exp(log_pmf(k, p)) - std::exp(log_pmf(k, q)));
  return 0.5 * tv;
}

double bernoulli_testing_lower_bound(int L, double epsilon) {
  if (L < 1) throw InvalidInput("L must be positive");
  if (!(epsilon > 0.0 && epsilon < 0.25)) throw InvalidInput("requires 0 < epsilon < 1/4");
  auto ok = [&](double d) { return 1.0 - binomial_tv(L, 0.5 + d, 0.5 - d) >= 2.0 * epsilon; };
  double lo = 0.0, hi = 0.5;
  for (int i = 0; i < 100 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace affine_minimax

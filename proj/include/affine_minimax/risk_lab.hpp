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
#include <functional>
#include <vector>

#include "affine_minimax/estimator.hpp"

namespace affine_minimax {

/// Two-sided 99.9% normal quantile used for all Wilson bounds.
inline constexpr double kWilsonZ = 3.2905267314919255;

/// Upper end of the Wilson score interval for k successes out of n.
double wilson_upper(long k, long n, double z = kWilsonZ);

/// Fixed-width histogram of |g_hat - g^T x| on [0, hi) with an overflow bin.
struct ErrorHistogram {
  double hi = 0.0;
  std::vector<long> counts;
  long overflow = 0;
};

struct PointRisk {
  Vec x;
  double truth = 0.0;
  long reps = 0;
  long violations = 0;
  double frequency = 0.0;
  double wilson_upper = 0.0;
  double mean_abs_error = 0.0;
  double max_abs_error = 0.0;
  ErrorHistogram histogram;
};

inline constexpr double kCoverageSlack = 1.2;

struct RiskReport {
  double threshold = 0.0;
  double epsilon = 0.0;
  long n_reps = 0;
  std::vector<PointRisk> points;
  double worst_frequency = 0.0;
  double worst_wilson_upper = 0.0;
  /// Every point has raw frequency < epsilon.
  bool all_below_epsilon() const;
  /// Every point has Wilson upper bound < kCoverageSlack * epsilon.
  bool passed() const;
};

/// Draws one estimate at signal x from the stream rng.
using Simulator = std::function<double(const Vec& x, Philox& rng)>;

struct MonteCarloOptions {
  long n_reps = 100000;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  int histogram_bins = 40;
};

/// Replication i at point j draws from Philox(seed, j, i), so the report is
/// independent of the thread count.
RiskReport mc_risk_custom(const Simulator& simulate, const Vec& g, const std::vector<Vec>& x_list,
                          double threshold, double epsilon, const MonteCarloOptions& options);

/// Violation frequencies of |g_hat - g^T x| > threshold (default: the
/// estimator's risk bound). Tied groups are simulated through their
/// sufficient statistics.
RiskReport mc_risk(const EstimationProblem& problem, const AffineEstimator& estimator,
                   const std::vector<Vec>& x_list, const MonteCarloOptions& options,
                   double threshold = -1.0);

/// One draw of sum over the copies of a tied group of phi(w).
double sample_group_sum(const ChannelFamily& family, const Vec& phi, const Vec& mu, int count,
                        Philox& rng);

/// Half the dual value at r = ln(1 / (4 eps)) / 2: a lower bound on the
/// minimax epsilon-risk.
double lower_bound_hellinger(const EstimationProblem& problem, const SolverOptions& options = {});

/// Total variation between Bin(n, p) and Bin(n, q) by full enumeration.
double binomial_tv(int n, double p, double q);

/// Largest d in [0, 1/2) with 1 - TV(Bin(L, 1/2 + d), Bin(L, 1/2 - d)) >= 2 eps.
double bernoulli_testing_lower_bound(int L, double epsilon);

}  // namespace affine_minimax

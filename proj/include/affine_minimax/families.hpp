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

#include <string>
#include <vector>

#include "affine_minimax/rng.hpp"
#include "affine_minimax/types.hpp"

namespace affine_minimax {

enum class FamilyKind { Discrete, Poisson, Gaussian };

std::string to_string(FamilyKind kind);

/// Default strict-interior margin for parameter-domain membership.
inline constexpr double kDomainMargin = 1e-12;

/// One good pair (D, F): a density family together with its space of test
/// functions.
///
/// Test functions are held symbolically as coefficient vectors:
///   - Discrete(M): the table (v_1, ..., v_M), phi(i) = v_i.
///   - Poisson: (a, b), phi(i) = a*i + b.
///   - Gaussian(Sigma, k): (s_1, ..., s_k, c), phi(w) = s^T w + c.
/// Parameters are vectors in R^param_dim(): a probability vector, a rate, or a
/// mean. Observations are vectors in R^obs_dim(): a 0-based category index,
/// a count, or a point of R^k.
///
/// The Gaussian density is the standard N(mu, Sigma) one, so the
/// log-exp-moment is c + s^T mu + s^T Sigma s / 2.
class ChannelFamily {
 public:
  static ChannelFamily discrete(int size);
  static ChannelFamily poisson();
  /// Throws InvalidInput unless sigma is symmetric positive definite.
  static ChannelFamily gaussian(const Mat& sigma);
  static ChannelFamily gaussian_identity(int dim);

  FamilyKind kind() const { return kind_; }
  int param_dim() const;
  int coef_dim() const;
  int obs_dim() const;
  /// Discrete size M, or Gaussian dimension k; 1 for Poisson.
  int size() const { return size_; }
  const Mat& sigma() const { return sigma_; }
  bool identity_covariance() const { return identity_; }

  /// True when mu lies in the open parameter set with the given margin.
  bool in_domain(const Vec& mu, double margin = kDomainMargin) const;

  /// F_phi(mu) = ln E_mu exp(phi(w)).
  double lem(const Vec& phi, const Vec& mu) const;
  Vec lem_grad_mu(const Vec& phi, const Vec& mu) const;
  /// Gradient of lem with respect to the test-function coefficients.
  Vec lem_grad_phi(const Vec& phi, const Vec& mu) const;

  /// Coefficients of ln(p_mu / p_nu).
  Vec log_likelihood_ratio(const Vec& mu, const Vec& nu) const;

  /// ln of the Hellinger affinity, integral of sqrt(p_mu p_nu).
  double affinity_log(const Vec& mu, const Vec& nu) const;
  void affinity_log_grad(const Vec& mu, const Vec& nu, Vec& grad_mu, Vec& grad_nu) const;

  /// phi(w) for one observation.
  double evaluate(const Vec& phi, const Vec& obs) const;

  Vec sample(const Vec& mu, Philox& rng) const;

  /// True when lem(phi, .) is affine in mu for every phi (Poisson, Gaussian).
  bool lem_affine_in_mu() const { return kind_ != FamilyKind::Discrete; }

  bool operator==(const ChannelFamily& other) const;

 private:
  ChannelFamily(FamilyKind kind, int size) : kind_(kind), size_(size) {}

  void check_param(const Vec& mu, const char* what) const;
  void check_coef(const Vec& phi) const;

  FamilyKind kind_;
  int size_;
  bool identity_ = false;
  Mat sigma_;
  Mat precision_;
  Mat sigma_chol_;  // lower factor, for sampling
};

/// A test function of a product family: one coefficient vector per factor.
struct TestFunction {
  std::vector<Vec> parts;

  TestFunction& operator+=(const TestFunction& other);
  TestFunction& operator*=(double t);
  friend TestFunction operator+(TestFunction a, const TestFunction& b) { return a += b; }
  friend TestFunction operator*(double t, TestFunction a) { return a *= t; }
};

/// A parameter of a product family: one parameter vector per factor.
struct ParamPoint {
  std::vector<Vec> parts;
};

/// Finite direct product of good pairs. A factor with count m stands for m
/// i.i.d. channels that share one test function.
struct FamilyFactor {
  ChannelFamily family;
  int count = 1;
};

class FamilySpec {
 public:
  FamilySpec() = default;
  explicit FamilySpec(std::vector<FamilyFactor> factors);
  explicit FamilySpec(ChannelFamily single, int count = 1);

  const std::vector<FamilyFactor>& factors() const { return factors_; }
  int num_factors() const { return static_cast<int>(factors_.size()); }
  int num_channels() const;

  TestFunction zero_test_function() const;

 private:
  std::vector<FamilyFactor> factors_;
};

double lem(const FamilySpec& spec, const TestFunction& phi, const ParamPoint& mu);
std::vector<Vec> lem_grad_mu(const FamilySpec& spec, const TestFunction& phi,
                             const ParamPoint& mu);
TestFunction log_likelihood_ratio(const FamilySpec& spec, const ParamPoint& mu,
                                  const ParamPoint& nu);
double hellinger_affinity_log(const FamilySpec& spec, const ParamPoint& mu,
                              const ParamPoint& nu);

/// One draw per channel; a factor with count m contributes m consecutive
/// entries.
std::vector<Vec> sample(const FamilySpec& spec, const ParamPoint& mu, Philox& rng);

}  // namespace affine_minimax

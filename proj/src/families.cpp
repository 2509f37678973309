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

#include "affine_minimax/families.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace affine_minimax {

namespace {

constexpr double kSimplexSumTol = 1e-8;

std::string dims(long got, long want) {
  std::ostringstream os;
  os << "got " << got << ", expected " << want;
  return os.str();
}

}  // namespace

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Discrete: return "discrete";
    case FamilyKind::Poisson: return "poisson";
    case FamilyKind::Gaussian: return "gaussian";
  }
  return "unknown";
}

ChannelFamily ChannelFamily::discrete(int size) {
  if (size < 2) throw InvalidInput("discrete family needs at least 2 outcomes");
  return ChannelFamily(FamilyKind::Discrete, size);
}

ChannelFamily ChannelFamily::poisson() { return ChannelFamily(FamilyKind::Poisson, 1); }

ChannelFamily ChannelFamily::gaussian(const Mat& sigma) {
  if (sigma.rows() == 0 || sigma.rows() != sigma.cols())
    throw InvalidInput("gaussian covariance must be a non-empty square matrix");
  if (!sigma.isApprox(sigma.transpose(), 1e-12))
    throw InvalidInput("gaussian covariance must be symmetric");
  Eigen::LLT<Mat> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw InvalidInput("gaussian covariance must be positive definite");
  ChannelFamily f(FamilyKind::Gaussian, static_cast<int>(sigma.rows()));
  f.sigma_ = sigma;
  f.sigma_chol_ = llt.matrixL();
  f.precision_ = llt.solve(Mat::Identity(sigma.rows(), sigma.cols()));
  f.identity_ = sigma.isIdentity(0.0);
  return f;
}

ChannelFamily ChannelFamily::gaussian_identity(int dim) {
  if (dim < 1) throw InvalidInput("gaussian dimension must be positive");
  return gaussian(Mat::Identity(dim, dim));
}

int ChannelFamily::param_dim() const { return kind_ == FamilyKind::Poisson ? 1 : size_; }

int ChannelFamily::coef_dim() const {
  switch (kind_) {
    case FamilyKind::Discrete: return size_;
    case FamilyKind::Poisson: return 2;
    case FamilyKind::Gaussian: return size_ + 1;
  }
  return 0;
}

int ChannelFamily::obs_dim() const { return kind_ == FamilyKind::Gaussian ? size_ : 1; }

bool ChannelFamily::operator==(const ChannelFamily& other) const {
  if (kind_ != other.kind_ || size_ != other.size_) return false;
  return kind_ != FamilyKind::Gaussian || sigma_ == other.sigma_;
}

bool ChannelFamily::in_domain(const Vec& mu, double margin) const {
  if (mu.size() != param_dim() || !mu.allFinite()) return false;
  switch (kind_) {
    case FamilyKind::Discrete:
      return mu.minCoeff() > margin && std::abs(mu.sum() - 1.0) <= kSimplexSumTol;
    case FamilyKind::Poisson:
      return mu[0] > margin;
    case FamilyKind::Gaussian:
      return true;
  }
  return false;
}

void ChannelFamily::check_param(const Vec& mu, const char* what) const {
  if (mu.size() != param_dim())
    throw InvalidInput(std::string(what) + " dimension mismatch for " + to_string(kind_) +
                       " family: " + dims(mu.size(), param_dim()));
  if (!in_domain(mu, 0.0))
    throw InvalidInput(std::string(what) + " lies outside the parameter domain of the " +
                       to_string(kind_) + " family");
}

void ChannelFamily::check_coef(const Vec& phi) const {
  if (phi.size() != coef_dim())
    throw InvalidInput("test function dimension mismatch for " + to_string(kind_) +
                       " family: " + dims(phi.size(), coef_dim()));
}

double ChannelFamily::lem(const Vec& phi, const Vec& mu) const {
  check_coef(phi);
  check_param(mu, "mu");
  switch (kind_) {
    case FamilyKind::Discrete: {
      const double vmax = phi.maxCoeff();
      return vmax + std::log(((phi.array() - vmax).exp() * mu.array()).sum());
    }
    case FamilyKind::Poisson:
      return phi[1] - mu[0] + mu[0] * std::exp(phi[0]);
    case FamilyKind::Gaussian: {
      const auto s = phi.head(size_);
      return phi[size_] + s.dot(mu) + 0.5 * s.dot(sigma_ * s);
    }
  }
  return 0.0;
}

Vec ChannelFamily::lem_grad_mu(const Vec& phi, const Vec& mu) const {
  check_coef(phi);
  check_param(mu, "mu");
  switch (kind_) {
    case FamilyKind::Discrete: {
      const double vmax = phi.maxCoeff();
      const Vec w = (phi.array() - vmax).exp();
      return w / w.dot(mu);
    }
    case FamilyKind::Poisson:
      return Vec::Constant(1, std::exp(phi[0]) - 1.0);
    case FamilyKind::Gaussian:
      return phi.head(size_);
  }
  return {};
}

Vec ChannelFamily::lem_grad_phi(const Vec& phi, const Vec& mu) const {
  check_coef(phi);
  check_param(mu, "mu");
  switch (kind_) {
    case FamilyKind::Discrete: {
      const double vmax = phi.maxCoeff();
      Vec w = (phi.array() - vmax).exp() * mu.array();
      return w / w.sum();
    }
    case FamilyKind::Poisson: {
      Vec g(2);
      g << mu[0] * std::exp(phi[0]), 1.0;
      return g;
    }
    case FamilyKind::Gaussian: {
      Vec g(size_ + 1);
      g.head(size_) = mu + sigma_ * phi.head(size_);
      g[size_] = 1.0;
      return g;
    }
  }
  return {};
}

Vec ChannelFamily::log_likelihood_ratio(const Vec& mu, const Vec& nu) const {
  check_param(mu, "mu");
  check_param(nu, "nu");
  switch (kind_) {
    case FamilyKind::Discrete:
      return (mu.array().log() - nu.array().log()).matrix();
    case FamilyKind::Poisson: {
      Vec phi(2);
      phi << std::log(mu[0]) - std::log(nu[0]), nu[0] - mu[0];
      return phi;
    }
    case FamilyKind::Gaussian: {
      Vec phi(size_ + 1);
      phi.head(size_) = precision_ * (mu - nu);
      phi[size_] = 0.5 * (nu.dot(precision_ * nu) - mu.dot(precision_ * mu));
      return phi;
    }
  }
  return {};
}

double ChannelFamily::affinity_log(const Vec& mu, const Vec& nu) const {
  check_param(mu, "mu");
  check_param(nu, "nu");
  switch (kind_) {
    case FamilyKind::Discrete:
      return std::log((mu.array() * nu.array()).sqrt().sum());
    case FamilyKind::Poisson: {
      const double d = std::sqrt(mu[0]) - std::sqrt(nu[0]);
      return -0.5 * d * d;
    }
    case FamilyKind::Gaussian: {
      const Vec d = mu - nu;
      return -0.125 * d.dot(precision_ * d);
    }
  }
  return 0.0;
}

void ChannelFamily::affinity_log_grad(const Vec& mu, const Vec& nu, Vec& grad_mu,
                                      Vec& grad_nu) const {
  check_param(mu, "mu");
  check_param(nu, "nu");
  switch (kind_) {
    case FamilyKind::Discrete: {
      const Eigen::ArrayXd root = (mu.array() * nu.array()).sqrt();
      const double s = root.sum();
      grad_mu = (0.5 * root / mu.array() / s).matrix();
      grad_nu = (0.5 * root / nu.array() / s).matrix();
      return;
    }
    case FamilyKind::Poisson: {
      const double sm = std::sqrt(mu[0]);
      const double sn = std::sqrt(nu[0]);
      grad_mu = Vec::Constant(1, -0.5 * (sm - sn) / sm);
      grad_nu = Vec::Constant(1, 0.5 * (sm - sn) / sn);
      return;
    }
    case FamilyKind::Gaussian: {
      grad_mu = -0.25 * (precision_ * (mu - nu));
      grad_nu = -grad_mu;
      return;
    }
  }
}

double ChannelFamily::evaluate(const Vec& phi, const Vec& obs) const {
  check_coef(phi);
  if (obs.size() != obs_dim())
    throw InvalidInput("observation dimension mismatch for " + to_string(kind_) +
                       " family: " + dims(obs.size(), obs_dim()));
  switch (kind_) {
    case FamilyKind::Discrete: {
      const double idx = obs[0];
      if (idx < 0 || idx >= size_ || idx != std::floor(idx))
        throw InvalidInput("discrete observation must be an index in [0, size)");
      return phi[static_cast<int>(idx)];
    }
    case FamilyKind::Poisson:
      if (obs[0] < 0 || obs[0] != std::floor(obs[0]))
        throw InvalidInput("poisson observation must be a nonnegative integer");
      return phi[0] * obs[0] + phi[1];
    case FamilyKind::Gaussian:
      return phi.head(size_).dot(obs) + phi[size_];
  }
  return 0.0;
}

Vec ChannelFamily::sample(const Vec& mu, Philox& rng) const {
  check_param(mu, "mu");
  switch (kind_) {
    case FamilyKind::Discrete: {
      const double u = rng.uniform() * mu.sum();
      double acc = 0.0;
      for (int i = 0; i < size_; ++i) {
        acc += mu[i];
        if (u < acc) return Vec::Constant(1, i);
      }
      return Vec::Constant(1, size_ - 1);
    }
    case FamilyKind::Poisson: {
      std::poisson_distribution<long long> dist(mu[0]);
      return Vec::Constant(1, static_cast<double>(dist(rng)));
    }
    case FamilyKind::Gaussian: {
      std::normal_distribution<double> normal;
      Vec z(size_);
      for (int i = 0; i < size_; ++i) z[i] = normal(rng);
      return mu + sigma_chol_ * z;
    }
  }
  return {};
}

TestFunction& TestFunction::operator+=(const TestFunction& other) {
  if (parts.size() != other.parts.size())
    throw InvalidInput("test functions belong to different product families");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].size() != other.parts[i].size())
      throw InvalidInput("test function factor dimension mismatch");
    parts[i] += other.parts[i];
  }
  return *this;
}

TestFunction& TestFunction::operator*=(double t) {
  for (auto& p : parts) p *= t;
  return *this;
}

FamilySpec::FamilySpec(std::vector<FamilyFactor> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw InvalidInput("product family needs at least one factor");
  for (const auto& f : factors_)
    if (f.count < 1) throw InvalidInput("factor channel count must be positive");
}

FamilySpec::FamilySpec(ChannelFamily single, int count)
    : FamilySpec(std::vector<FamilyFactor>{{std::move(single), count}}) {}

int FamilySpec::num_channels() const {
  int n = 0;
  for (const auto& f : factors_) n += f.count;
  return n;
}

TestFunction FamilySpec::zero_test_function() const {
  TestFunction t;
  for (const auto& f : factors_) t.parts.push_back(Vec::Zero(f.family.coef_dim()));
  return t;
}

namespace {

void check_arity(const FamilySpec& spec, std::size_t n, const char* what) {
  if (n != spec.factors().size())
    throw InvalidInput(std::string(what) + " has " + std::to_string(n) +
                       " factors, family has " + std::to_string(spec.factors().size()));
}

}  // namespace

double lem(const FamilySpec& spec, const TestFunction& phi, const ParamPoint& mu) {
  check_arity(spec, phi.parts.size(), "test function");
  check_arity(spec, mu.parts.size(), "parameter");
  double total = 0.0;
  for (std::size_t i = 0; i < spec.factors().size(); ++i) {
    const auto& f = spec.factors()[i];
    total += f.count * f.family.lem(phi.parts[i], mu.parts[i]);
  }
  return total;
}

std::vector<Vec> lem_grad_mu(const FamilySpec& spec, const TestFunction& phi,
                             const ParamPoint& mu) {
  check_arity(spec, phi.parts.size(), "test function");
  check_arity(spec, mu.parts.size(), "parameter");
  std::vector<Vec> out;
  for (std::size_t i = 0; i < spec.factors().size(); ++i) {
    const auto& f = spec.factors()[i];
    out.push_back(f.count * f.family.lem_grad_mu(phi.parts[i], mu.parts[i]));
  }
  return out;
}

TestFunction log_likelihood_ratio(const FamilySpec& spec, const ParamPoint& mu,
                                  const ParamPoint& nu) {
  check_arity(spec, mu.parts.size(), "parameter mu");
  check_arity(spec, nu.parts.size(), "parameter nu");
  TestFunction out;
  for (std::size_t i = 0; i < spec.factors().size(); ++i)
    out.parts.push_back(spec.factors()[i].family.log_likelihood_ratio(mu.parts[i], nu.parts[i]));
  return out;
}

double hellinger_affinity_log(const FamilySpec& spec, const ParamPoint& mu,
                              const ParamPoint& nu) {
  check_arity(spec, mu.parts.size(), "parameter mu");
  check_arity(spec, nu.parts.size(), "parameter nu");
  double total = 0.0;
  for (std::size_t i = 0; i < spec.factors().size(); ++i) {
    const auto& f = spec.factors()[i];
    total += f.count * f.family.affinity_log(mu.parts[i], nu.parts[i]);
  }
  return total;
}

std::vector<Vec> sample(const FamilySpec& spec, const ParamPoint& mu, Philox& rng) {
  check_arity(spec, mu.parts.size(), "parameter");
  std::vector<Vec> out;
  out.reserve(spec.num_channels());
  for (std::size_t i = 0; i < spec.factors().size(); ++i) {
    const auto& f = spec.factors()[i];
    for (int c = 0; c < f.count; ++c) out.push_back(f.family.sample(mu.parts[i], rng));
  }
  return out;
}

}  // namespace affine_minimax

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

#include "doctest.h"

#include <cmath>

#include "affine_minimax/families.hpp"
#include "oracles.hpp"

using namespace affine_minimax;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
Vec v1(double a) { return Vec::Constant(1, a); }

ChannelFamily gauss1() { return ChannelFamily::gaussian_identity(1); }

// Random parameter inside the domain of each family.
Vec random_param(const ChannelFamily& f, Philox& rng) {
  switch (f.kind()) {
    case FamilyKind::Discrete: {
      Vec m(f.size());
      for (int i = 0; i < m.size(); ++i) m[i] = 0.05 + rng.uniform();
      return m / m.sum();
    }
    case FamilyKind::Poisson: return v1(0.1 + 10.0 * rng.uniform());
    case FamilyKind::Gaussian: {
      Vec m(f.size());
      for (int i = 0; i < m.size(); ++i) m[i] = 4.0 * rng.uniform() - 2.0;
      return m;
    }
  }
  return {};
}

Vec random_coef(const ChannelFamily& f, Philox& rng) {
  Vec c(f.coef_dim());
  for (int i = 0; i < c.size(); ++i) c[i] = 2.0 * rng.uniform() - 1.0;
  return c;
}

std::vector<ChannelFamily> all_families() {
  Mat sigma(2, 2);
  sigma << 2.0, 0.3, 0.3, 0.5;
  return {ChannelFamily::discrete(2), ChannelFamily::discrete(5), ChannelFamily::poisson(),
          gauss1(), ChannelFamily::gaussian(sigma)};
}

}  // namespace

TEST_CASE("lem examples") {
  const auto pois = ChannelFamily::poisson();
  CHECK(pois.lem(v2(0, 0), v1(3)) == doctest::Approx(0.0));
  CHECK(pois.lem(v2(std::log(2.0), 0), v1(1)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gauss1().lem(v2(1, 0), v1(0)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(ChannelFamily::discrete(2).lem(v2(std::log(3.0), 0), v2(0.5, 0.5)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("lem matches series and quadrature oracles") {
  Philox rng(11);
  for (int t = 0; t < 10; ++t) {
    const double a = 2.0 * rng.uniform() - 1.0, b = rng.uniform(), mu = 0.2 + 5 * rng.uniform();
    const double got = ChannelFamily::poisson().lem(v2(a, b), v1(mu));
    CHECK(std::abs(got - oracle::poisson_lem_series(a, b, mu)) <= 1e-9 * (1 + std::abs(got)));
    const double s = 2.0 * rng.uniform() - 1.0, m = 2.0 * rng.uniform() - 1.0;
    const double gg = gauss1().lem(v2(s, b), v1(m));
    CHECK(std::abs(gg - oracle::gaussian_lem_quadrature(s, b, m)) <= 1e-9 * (1 + std::abs(gg)));
  }
}

TEST_CASE("lem_grad_mu examples") {
  const auto pois = ChannelFamily::poisson();
  CHECK(pois.lem_grad_mu(v2(0, 0), v1(2))[0] == doctest::Approx(0.0));
  CHECK(pois.lem_grad_mu(v2(std::log(2.0), 0), v1(2))[0] == doctest::Approx(1.0));
  const Vec g = ChannelFamily::discrete(2).lem_grad_mu(v2(0, 0), v2(0.3, 0.7));
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(g[1] == doctest::Approx(1.0));
}

TEST_CASE("log_likelihood_ratio examples") {
  const Vec same = ChannelFamily::poisson().log_likelihood_ratio(v1(2.5), v1(2.5));
  CHECK(same.norm() == doctest::Approx(0.0));
  const Vec p = ChannelFamily::poisson().log_likelihood_ratio(v1(2), v1(1));
  CHECK(p[0] == doctest::Approx(std::log(2.0)));
  CHECK(p[1] == doctest::Approx(-1.0));
  const Vec d = ChannelFamily::discrete(2).log_likelihood_ratio(v2(0.6, 0.4), v2(0.5, 0.5));
  CHECK(d[0] == doctest::Approx(std::log(1.2)));
  CHECK(d[1] == doctest::Approx(std::log(0.8)));
  for (const auto& f : all_families()) {
    Philox rng(3);
    const Vec mu = random_param(f, rng);
    CHECK(f.log_likelihood_ratio(mu, mu).norm() <= 1e-14);
  }
}

TEST_CASE("log_likelihood_ratio evaluates to the log density ratio") {
  // Poisson: ln p_mu(i) - ln p_nu(i) against the pmf formula.
  const Vec llr = ChannelFamily::poisson().log_likelihood_ratio(v1(3.2), v1(1.7));
  for (int i = 0; i < 10; ++i)
    CHECK(ChannelFamily::poisson().evaluate(llr, v1(i)) ==
          doctest::Approx(oracle::poisson_log_pmf(i, 3.2) - oracle::poisson_log_pmf(i, 1.7)));
  const Vec gl = gauss1().log_likelihood_ratio(v1(0.7), v1(-0.4));
  for (double w : {-2.0, 0.0, 1.3})
    CHECK(gauss1().evaluate(gl, v1(w)) ==
          doctest::Approx(std::log(oracle::normal_pdf(w, 0.7) / oracle::normal_pdf(w, -0.4))));
}

TEST_CASE("affinity examples and oracles") {
  for (const auto& f : all_families()) {
    Philox rng(5);
    const Vec mu = random_param(f, rng);
    CHECK(f.affinity_log(mu, mu) == doctest::Approx(0.0));
  }
  const double p = ChannelFamily::poisson().affinity_log(v1(4), v1(1));
  CHECK(p == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(std::abs(p - std::log(oracle::poisson_affinity_series(4, 1))) <= 1e-12);
  const double g = gauss1().affinity_log(v1(2), v1(0));
  CHECK(g == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(std::abs(g - std::log(oracle::gaussian_affinity_quadrature(2, 0))) <= 1e-9);

  Philox rng(9);
  for (int t = 0; t < 20; ++t) {
    const double a = 0.1 + 8 * rng.uniform(), b = 0.1 + 8 * rng.uniform();
    CHECK(std::abs(ChannelFamily::poisson().affinity_log(v1(a), v1(b)) -
                   std::log(oracle::poisson_affinity_series(a, b))) <= 1e-9);
    const double c = 3 * rng.uniform() - 1.5, d = 3 * rng.uniform() - 1.5;
    CHECK(std::abs(gauss1().affinity_log(v1(c), v1(d)) -
                   std::log(oracle::gaussian_affinity_quadrature(c, d))) <= 1e-9);
    const auto disc = ChannelFamily::discrete(4);
    const Vec m = random_param(disc, rng), n = random_param(disc, rng);
    double brute = 0.0;
    for (int i = 0; i < 4; ++i) brute += std::sqrt(m[i] * n[i]);
    CHECK(std::abs(disc.affinity_log(m, n) - std::log(brute)) <= 1e-14);
  }
}

TEST_CASE("affinity is symmetric and attained by half the log-likelihood ratio") {
  Philox rng(21);
  for (const auto& f : all_families())
    for (int t = 0; t < 10; ++t) {
      const Vec mu = random_param(f, rng), nu = random_param(f, rng);
      CHECK(f.affinity_log(mu, nu) == f.affinity_log(nu, mu));
      const Vec half = 0.5 * f.log_likelihood_ratio(mu, nu);
      const double attained = 0.5 * (f.lem(-half, mu) + f.lem(half, nu));
      // ln AffH = min over phi of 1/2 [lem(-phi, mu) + lem(phi, nu)].
      CHECK(std::abs(attained - f.affinity_log(mu, nu)) <= 1e-10);
      for (int k = 0; k < 5; ++k) {
        const Vec phi = half + 0.3 * random_coef(f, rng);
        CHECK(0.5 * (f.lem(-phi, mu) + f.lem(phi, nu)) >= f.affinity_log(mu, nu) - 1e-10);
      }
    }
}

TEST_CASE("product affinity is additive") {
  const FamilySpec spec({{ChannelFamily::poisson(), 1}, {ChannelFamily::discrete(3), 1}, {gauss1(), 1}});
  ParamPoint mu, nu;
  mu.parts = {v1(2.0), Vec::Constant(3, 1.0 / 3), v1(0.3)};
  Vec d(3);
  d << 0.2, 0.5, 0.3;
  nu.parts = {v1(0.7), d, v1(-0.4)};
  const double sum = ChannelFamily::poisson().affinity_log(mu.parts[0], nu.parts[0]) +
                     ChannelFamily::discrete(3).affinity_log(mu.parts[1], nu.parts[1]) +
                     gauss1().affinity_log(mu.parts[2], nu.parts[2]);
  CHECK(hellinger_affinity_log(spec, mu, nu) == doctest::Approx(sum).epsilon(1e-15));
}

TEST_CASE("lem convexity, concavity and gradient probes") {
  Philox rng(33);
  for (const auto& f : all_families())
    for (int t = 0; t < 50; ++t) {
      const Vec mu = random_param(f, rng), mu2 = random_param(f, rng);
      const Vec p1 = random_coef(f, rng), p2 = random_coef(f, rng);
      const double s = rng.uniform();
      CHECK(f.lem(s * p1 + (1 - s) * p2, mu) <= s * f.lem(p1, mu) + (1 - s) * f.lem(p2, mu) + 1e-10);
      CHECK(f.lem(p1, s * mu + (1 - s) * mu2) >= s * f.lem(p1, mu) + (1 - s) * f.lem(p1, mu2) - 1e-10);

      const Vec grad = f.lem_grad_mu(p1, mu);
      for (int i = 0; i < mu.size(); ++i) {
        // Directions that stay in the domain: discrete moves mass between two cells.
        Vec dir = Vec::Zero(mu.size());
        dir[i] = 1.0;
        if (f.kind() == FamilyKind::Discrete) dir[(i + 1) % mu.size()] = -1.0;
        const double h = 1e-6 * (f.kind() == FamilyKind::Discrete ? mu.minCoeff() : 1.0);
        const double fd = (f.lem(p1, mu + h * dir) - f.lem(p1, mu - h * dir)) / (2 * h);
        const double an = grad.dot(dir);
        CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
      }
      const Vec gphi = f.lem_grad_phi(p1, mu);
      for (int i = 0; i < p1.size(); ++i) {
        Vec e = Vec::Zero(p1.size());
        e[i] = 1e-6;
        const double fd = (f.lem(p1 + e, mu) - f.lem(p1 - e, mu)) / 2e-6;
        CHECK(std::abs(fd - gphi[i]) <= 1e-6 * std::max(1.0, std::abs(gphi[i])));
      }
    }
}

TEST_CASE("affinity gradient matches finite differences") {
  Philox rng(41);
  for (const auto& f : {ChannelFamily::poisson(), gauss1()})
    for (int t = 0; t < 10; ++t) {
      const Vec mu = random_param(f, rng), nu = random_param(f, rng);
      Vec gm, gn;
      f.affinity_log_grad(mu, nu, gm, gn);
      const double h = 1e-6;
      const Vec e = Vec::Constant(1, h);
      const double fm = (f.affinity_log(mu + e, nu) - f.affinity_log(mu - e, nu)) / (2 * h);
      const double fn = (f.affinity_log(mu, nu + e) - f.affinity_log(mu, nu - e)) / (2 * h);
      CHECK(std::abs(fm - gm[0]) <= 1e-6 * std::max(1.0, std::abs(fm)));
      CHECK(std::abs(fn - gn[0]) <= 1e-6 * std::max(1.0, std::abs(fn)));
    }
}

TEST_CASE("sampling") {
  const int N = 1000000;
  {
    Philox rng(1);
    long ones = 0;
    for (int i = 0; i < N; ++i)
      ones += ChannelFamily::discrete(2).sample(v2(1 - 1e-12, 1e-12), rng)[0] == 0 ? 1 : 0;
    // Index 0 carries the mass 1 - 1e-12 (0-based indices).
    CHECK(static_cast<double>(ones) / N >= 1 - 1e-6);
  }
  {
    Philox rng(2);
    double s = 0;
    for (int i = 0; i < N; ++i) s += ChannelFamily::poisson().sample(v1(5), rng)[0];
    CHECK(std::abs(s / N - 5.0) <= 0.01);
  }
  {
    Philox rng(3);
    Vec s = Vec::Zero(2);
    const auto g2 = ChannelFamily::gaussian_identity(2);
    for (int i = 0; i < N; ++i) s += g2.sample(v2(1, -1), rng);
    s /= N;
    CHECK(std::abs(s[0] - 1.0) <= 0.005);
    CHECK(std::abs(s[1] + 1.0) <= 0.005);
  }
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(ChannelFamily::poisson().lem(v2(0, 0), v1(-1)), InvalidInput);
  CHECK_THROWS_AS(ChannelFamily::discrete(2).lem(v2(0, 0), v2(0.5, 0.6)), InvalidInput);
  CHECK_THROWS_AS(ChannelFamily::discrete(3).lem(v2(0, 0), v2(0.5, 0.5)), InvalidInput);
  Mat bad(2, 2);
  bad << 1, 2, 2, 1;
  CHECK_THROWS_AS(ChannelFamily::gaussian(bad), InvalidInput);
}

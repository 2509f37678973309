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

#include "affine_minimax/signal_sets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "affine_minimax/optim.hpp"

namespace affine_minimax {

namespace {

constexpr int kMaxBoxCornerDim = 20;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Vec dirichlet_weights(int k, Philox& rng) {
  Vec w(k);
  for (int i = 0; i < k; ++i) w[i] = -std::log(rng.uniform());
  return w / w.sum();
}

}  // namespace

SignalSet SignalSet::interval(double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || lo > hi)
    throw InvalidInput("interval requires finite lo <= hi");
  return SignalSet(Interval{lo, hi}, 1);
}

SignalSet SignalSet::box(Vec lo, Vec hi) {
  if (lo.size() == 0 || lo.size() != hi.size())
    throw InvalidInput("box bounds must be non-empty and of equal length");
  if (!lo.allFinite() || !hi.allFinite() || (lo.array() > hi.array()).any())
    throw InvalidInput("box requires finite lo <= hi componentwise");
  const int n = static_cast<int>(lo.size());
  return SignalSet(Box{std::move(lo), std::move(hi)}, n);
}

SignalSet SignalSet::simplex(int dim, double scale, double margin) {
  if (dim < 1) throw InvalidInput("simplex dimension must be positive");
  if (!(scale > 0)) throw InvalidInput("simplex scale must be positive");
  if (margin < 0 || margin * dim >= scale)
    throw InvalidInput("simplex margin must satisfy 0 <= margin < scale / dim");
  return SignalSet(Simplex{dim, scale, margin}, dim);
}

SignalSet SignalSet::vpolytope(std::vector<Vec> vertices) {
  if (vertices.empty()) throw InvalidInput("polytope needs at least one vertex");
  const auto n = vertices.front().size();
  if (n == 0) throw InvalidInput("polytope vertices must be non-empty");
  for (const auto& v : vertices)
    if (v.size() != n || !v.allFinite())
      throw InvalidInput("polytope vertices must be finite and of equal dimension");
  return SignalSet(VPolytope{std::move(vertices)}, static_cast<int>(n));
}

SignalSet SignalSet::singleton(const Vec& point) {
  if (point.size() == 1) return interval(point[0], point[0]);
  return box(point, point);
}

std::string SignalSet::kind() const {
  return std::visit(overloaded{[](const Interval&) { return std::string("interval"); },
                               [](const Box&) { return std::string("box"); },
                               [](const Simplex&) { return std::string("simplex"); },
                               [](const VPolytope&) { return std::string("vpolytope"); }},
                    shape_);
}

void SignalSet::check_dim(const Vec& v, const char* what) const {
  if (v.size() != dim_)
    throw InvalidInput(std::string(what) + " has dimension " + std::to_string(v.size()) +
                       ", signal set has dimension " + std::to_string(dim_));
}

LinMax SignalSet::lin_max(const Vec& c) const {
  check_dim(c, "linear objective");
  return std::visit(
      overloaded{
          [&](const Interval& s) {
            const double x = c[0] > 0 ? s.hi : s.lo;
            return LinMax{Vec::Constant(1, x), c[0] * x};
          },
          [&](const Box& s) {
            Vec x = (c.array() > 0).select(s.hi, s.lo);
            return LinMax{x, c.dot(x)};
          },
          [&](const Simplex& s) {
            Eigen::Index best = 0;
            c.maxCoeff(&best);  // first maximal index
            Vec x = Vec::Constant(dim_, s.margin);
            x[best] += s.scale - s.margin * dim_;
            return LinMax{x, c.dot(x)};
          },
          [&](const VPolytope& s) {
            std::size_t best = 0;
            double val = c.dot(s.vertices[0]);
            for (std::size_t i = 1; i < s.vertices.size(); ++i) {
              const double v = c.dot(s.vertices[i]);
              if (v > val) {
                val = v;
                best = i;
              }
            }
            return LinMax{s.vertices[best], val};
          }},
      shape_);
}

Vec project_simplex(const Vec& z, double scale) {
  const int n = static_cast<int>(z.size());
  std::vector<double> u(z.data(), z.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0, theta = 0.0;
  for (int i = 0; i < n; ++i) {
    cumsum += u[i];
    const double t = (cumsum - scale) / (i + 1);
    if (u[i] - t > 0) theta = t;
  }
  return (z.array() - theta).max(0.0).matrix();
}

Vec SignalSet::project(const Vec& z) const {
  check_dim(z, "point");
  return std::visit(
      overloaded{
          [&](const Interval& s) -> Vec { return Vec::Constant(1, std::clamp(z[0], s.lo, s.hi)); },
          [&](const Box& s) -> Vec { return Vec(z.cwiseMax(s.lo).cwiseMin(s.hi)); },
          [&](const Simplex& s) -> Vec {
            const Vec shifted = z.array() - s.margin;
            return Vec(project_simplex(shifted, s.scale - s.margin * dim_).array() + s.margin);
          },
          [&](const VPolytope& s) -> Vec {
            if (s.vertices.size() == 1) return s.vertices[0];
            const SmoothFn dist = [&](const Vec& x, Vec* grad) {
              if (grad) *grad = x - z;
              return 0.5 * (x - z).squaredNorm();
            };
            const auto oracle = [&](const Vec& c) { return lin_max(-c).point; };
            const double scale = 1.0 + z.squaredNorm() + diameter() * diameter();
            FrankWolfeOptions opts;
            opts.tol = 1e-22 * scale;
            opts.max_iter = 20000;
            return minimize_quadratic_fw(dist, oracle, oracle(s.vertices[0] - z), opts).x;
          }},
      shape_);
}

bool SignalSet::contains(const Vec& x, double tol) const {
  if (x.size() != dim_ || !x.allFinite()) return false;
  return std::visit(
      overloaded{
          [&](const Interval& s) { return x[0] >= s.lo - tol && x[0] <= s.hi + tol; },
          [&](const Box& s) {
            return ((x.array() >= s.lo.array() - tol) && (x.array() <= s.hi.array() + tol)).all();
          },
          [&](const Simplex& s) {
            return x.minCoeff() >= s.margin - tol &&
                   std::abs(x.sum() - s.scale) <= tol * (1.0 + s.scale);
          },
          [&](const VPolytope&) {
            const double scale = 1.0 + x.norm();
            return (project(x) - x).norm() <= tol * scale;
          }},
      shape_);
}

std::vector<Vec> SignalSet::vertices() const {
  return std::visit(
      overloaded{
          [&](const Interval& s) {
            std::vector<Vec> out{Vec::Constant(1, s.lo)};
            if (s.hi != s.lo) out.push_back(Vec::Constant(1, s.hi));
            return out;
          },
          [&](const Box& s) {
            if (dim_ > kMaxBoxCornerDim) throw InvalidInput("too many box corners to enumerate");
            std::vector<int> free;
            for (int i = 0; i < dim_; ++i)
              if (s.hi[i] != s.lo[i]) free.push_back(i);
            std::vector<Vec> out;
            const unsigned long count = 1ul << free.size();
            for (unsigned long mask = 0; mask < count; ++mask) {
              Vec v = s.lo;
              for (std::size_t j = 0; j < free.size(); ++j)
                if (mask & (1ul << j)) v[free[j]] = s.hi[free[j]];
              out.push_back(v);
            }
            return out;
          },
          [&](const Simplex& s) {
            std::vector<Vec> out;
            for (int i = 0; i < dim_; ++i) {
              Vec v = Vec::Constant(dim_, s.margin);
              v[i] += s.scale - s.margin * dim_;
              out.push_back(v);
            }
            return out;
          },
          [&](const VPolytope& s) { return s.vertices; }},
      shape_);
}

Vec SignalSet::center() const {
  return std::visit(
      overloaded{[&](const Interval& s) -> Vec { return Vec::Constant(1, 0.5 * (s.lo + s.hi)); },
                 [&](const Box& s) -> Vec { return Vec(0.5 * (s.lo + s.hi)); },
                 [&](const Simplex& s) -> Vec { return Vec::Constant(dim_, s.scale / dim_); },
                 [&](const VPolytope& s) -> Vec {
                   Vec c = Vec::Zero(dim_);
                   for (const auto& v : s.vertices) c += v;
                   return Vec(c / static_cast<double>(s.vertices.size()));
                 }},
      shape_);
}

Vec SignalSet::random_point(Philox& rng) const {
  return std::visit(
      overloaded{[&](const Interval& s) -> Vec { return Vec::Constant(1, s.lo + rng.uniform() * (s.hi - s.lo)); },
                 [&](const Box& s) -> Vec {
                   Vec x(dim_);
                   for (int i = 0; i < dim_; ++i) x[i] = s.lo[i] + rng.uniform() * (s.hi[i] - s.lo[i]);
                   return x;
                 },
                 [&](const Simplex& s) -> Vec {
                   const Vec w = dirichlet_weights(dim_, rng);
                   return Vec((s.scale - s.margin * dim_) * w.array() + s.margin);
                 },
                 [&](const VPolytope& s) -> Vec {
                   const Vec w = dirichlet_weights(static_cast<int>(s.vertices.size()), rng);
                   Vec x = Vec::Zero(dim_);
                   for (std::size_t i = 0; i < s.vertices.size(); ++i) x += w[i] * s.vertices[i];
                   return x;
                 }},
      shape_);
}

double SignalSet::diameter() const {
  return std::visit(
      overloaded{[](const Interval& s) { return s.hi - s.lo; },
                 [](const Box& s) { return (s.hi - s.lo).norm(); },
                 [](const Simplex& s) { return std::sqrt(2.0) * (s.scale - s.margin * s.dim); },
                 [](const VPolytope& s) {
                   double d = 0.0;
                   for (std::size_t i = 0; i < s.vertices.size(); ++i)
                     for (std::size_t j = i + 1; j < s.vertices.size(); ++j)
                       d = std::max(d, (s.vertices[i] - s.vertices[j]).norm());
                   return d;
                 }},
      shape_);
}

bool SignalSet::is_subset_of(const SignalSet& other, double tol) const {
  if (other.dim() != dim_) return false;
  for (const auto& v : vertices())
    if (!other.contains(v, tol)) return false;
  return true;
}

}  // namespace affine_minimax

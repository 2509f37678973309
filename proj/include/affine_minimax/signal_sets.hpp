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
#include <variant>
#include <vector>

#include "affine_minimax/rng.hpp"
#include "affine_minimax/types.hpp"

namespace affine_minimax {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct Box {
  Vec lo;
  Vec hi;
};

/// {x in R^n : x_i >= margin, sum_i x_i = scale}.
struct Simplex {
  int dim = 1;
  double scale = 1.0;
  double margin = 0.0;
};

struct VPolytope {
  std::vector<Vec> vertices;
};

struct LinMax {
  Vec point;
  double value = 0.0;
};

/// Convex compact signal set. Every variant is a polytope, so the linear
/// maximization oracle is exact and always returns a vertex. Ties go to the
/// lowest index.
class SignalSet {
 public:
  using Shape = std::variant<Interval, Box, Simplex, VPolytope>;

  static SignalSet interval(double lo, double hi);
  static SignalSet box(Vec lo, Vec hi);
  static SignalSet simplex(int dim, double scale = 1.0, double margin = 0.0);
  static SignalSet vpolytope(std::vector<Vec> vertices);
  static SignalSet singleton(const Vec& point);

  int dim() const { return dim_; }
  const Shape& shape() const { return shape_; }
  std::string kind() const;

  LinMax lin_max(const Vec& c) const;
  Vec project(const Vec& z) const;
  bool contains(const Vec& x, double tol = 1e-9) const;

  /// Extreme points (Box corners, simplex vertices, polytope vertices). Box
  /// corners are enumerated only up to 20 dimensions.
  std::vector<Vec> vertices() const;
  /// A point in the relative interior.
  Vec center() const;
  /// A random point of the set drawn as a random convex combination.
  Vec random_point(Philox& rng) const;
  /// Euclidean diameter bound from the vertex list.
  double diameter() const;

  /// Vertex-containment test: every extreme point of *this lies in other.
  bool is_subset_of(const SignalSet& other, double tol = 1e-9) const;

 private:
  SignalSet(Shape shape, int dim) : shape_(std::move(shape)), dim_(dim) {}

  void check_dim(const Vec& v, const char* what) const;

  Shape shape_;
  int dim_;
};

/// Euclidean projection of z onto the simplex {x >= 0, sum x = scale}.
Vec project_simplex(const Vec& z, double scale);

/// Affine map x -> A x + b of one channel group.
struct AffineMap {
  Mat A;
  Vec b;

  Vec apply(const Vec& x) const { return A * x + b; }
  int in_dim() const { return static_cast<int>(A.cols()); }
  int out_dim() const { return static_cast<int>(A.rows()); }
};

}  // namespace affine_minimax

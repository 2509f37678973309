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

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace affine_minimax {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised for malformed or inconsistent inputs (dimension mismatch, parameter
/// outside its open domain, confidence level out of range, ...).
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when an iterative solver exhausts its iteration budget. Solvers that
/// can hand back a usable partial result throw a subclass carrying it.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace affine_minimax

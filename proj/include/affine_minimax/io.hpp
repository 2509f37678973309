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
#include <string>
#include <vector>

#include "json.hpp"

#include "affine_minimax/estimator.hpp"
#include "affine_minimax/gaussian.hpp"
#include "affine_minimax/pet.hpp"

namespace affine_minimax {

using json = nlohmann::json;

/// A schema violation at a JSON pointer, e.g. "/set/lo".
class SchemaError : public InvalidInput {
 public:
  SchemaError(std::string pointer, const std::string& message)
      : InvalidInput(message), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

json to_json(const ChannelFamily& family);
ChannelFamily family_from_json(const json& j, const std::string& at = "");

json to_json(const SignalSet& set);
SignalSet set_from_json(const json& j, const std::string& at = "");

json to_json(const EstimationProblem& problem);
/// The generic problem schema; validates the result.
EstimationProblem problem_from_json(const json& j);

/// FNV-1a hash of the canonical problem JSON, as 16 hex digits.
std::string problem_fingerprint(const EstimationProblem& problem);

json to_json(const AffineEstimator& est);
AffineEstimator estimator_from_json(const json& j);

json to_json(const SaddleSolution& sol);

json to_json(const PetModel& model);
PetModel pet_model_from_json(const json& j);

GaussianProblem gaussian_problem_from_json(const json& j);

/// One entry per channel: a number for scalar observations or an array.
std::vector<Vec> observations_from_json(const json& j);

enum class ProblemKind { Generic, Gaussian, Pet };

struct ProblemFile {
  ProblemKind kind = ProblemKind::Generic;
  EstimationProblem problem;
  GaussianProblem gaussian;
  PetModel pet;
  std::vector<SignalSet> nested_sets;
  double delta = -1.0;
  double delta_prime = -1.0;
  SolverOptions options;
  std::uint64_t seed = 1;
};

/// Parses and validates a problem file. Errors are InvalidInput with a
/// "path:line: " prefix pointing at the offending field.
ProblemFile load_problem_file(const std::string& path);
ProblemFile parse_problem_text(const std::string& text, const std::string& name = "<input>");

/// Reads a JSON document, with line-anchored parse errors.
json read_json_file(const std::string& path);

}  // namespace affine_minimax

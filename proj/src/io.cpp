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

#include "affine_minimax/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace affine_minimax {

namespace {

[[noreturn]] void fail(const std::string& at, const std::string& message) {
  throw SchemaError(at.empty() ? "/" : at, message);
}

const json& field(const json& j, const std::string& key, const std::string& at) {
  if (!j.is_object()) fail(at, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(at + "/" + key, "missing required field \"" + key + "\"");
  return *it;
}

double number(const json& j, const std::string& at) {
  if (!j.is_number()) fail(at, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& at) {
  if (!j.is_number_integer()) fail(at, "expected an integer");
  return j.get<int>();
}

Vec vector(const json& j, const std::string& at) {
  if (j.is_number()) return Vec::Constant(1, j.get<double>());
  if (!j.is_array()) fail(at, "expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = number(j[i], at + "/" + std::to_string(i));
  return v;
}

/// Rows of numbers; a flat array is read as a single row.
Mat matrix(const json& j, const std::string& at) {
  if (!j.is_array() || j.empty()) fail(at, "expected a non-empty array of rows");
  if (!j[0].is_array()) {
    const Vec row = vector(j, at);
    return row.transpose();
  }
  const std::size_t cols = j[0].size();
  Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string rat = at + "/" + std::to_string(r);
    if (!j[r].is_array() || j[r].size() != cols) fail(rat, "rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = number(j[r][c], rat + "/" + std::to_string(c));
  }
  return m;
}

json vec_json(const Vec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json mat_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec_json(m.row(r).transpose()));
  return rows;
}

std::string kind_of(const json& j, const std::string& at) {
  const json& k = field(j, "kind", at);
  if (!k.is_string()) fail(at + "/kind", "expected a string");
  return k.get<std::string>();
}

/// Wraps a library InvalidInput raised while building an object at `at`.
template <class F>
auto anchored(const std::string& at, F&& build) {
  try {
    return build();
  } catch (const SchemaError&) {
    throw;
  } catch (const InvalidInput& e) {
    fail(at, e.what());
  }
}

int line_of(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

/// Line of the last key of a JSON pointer, found by scanning the keys in order.
int locate(const std::string& text, const std::string& pointer) {
  std::size_t pos = 0;
  std::size_t found = std::string::npos;
  std::stringstream ss(pointer);
  std::string token;
  while (std::getline(ss, token, '/')) {
    if (token.empty() || token.find_first_not_of("0123456789") == std::string::npos) continue;
    const std::size_t hit = text.find("\"" + token + "\"", pos);
    if (hit == std::string::npos) break;
    found = pos = hit;
  }
  return found == std::string::npos ? 1 : line_of(text, found);
}

std::vector<ChannelFamily> factor_families(const json& fam, const std::string& at) {
  if (kind_of(fam, at) != "product") return {family_from_json(fam, at)};
  const json& factors = field(fam, "factors", at);
  if (!factors.is_array() || factors.empty()) fail(at + "/factors", "expected a non-empty array");
  std::vector<ChannelFamily> out;
  for (std::size_t i = 0; i < factors.size(); ++i)
    out.push_back(family_from_json(factors[i], at + "/factors/" + std::to_string(i)));
  return out;
}

SolverOptions options_from_json(const json& j, std::uint64_t& seed) {
  SolverOptions o;
  if (!j.contains("solver")) return o;
  const json& s = j["solver"];
  const std::string at = "/solver";
  if (!s.is_object()) fail(at, "expected an object");
  if (s.contains("tol")) o.tol_rel = number(s["tol"], at + "/tol");
  if (s.contains("tol_inner")) o.tol_inner = number(s["tol_inner"], at + "/tol_inner");
  if (s.contains("max_iter")) o.max_iter = integer(s["max_iter"], at + "/max_iter");
  if (s.contains("seed")) seed = s["seed"].get<std::uint64_t>();
  if (!(o.tol_rel > 0)) fail(at + "/tol", "tol must be positive");
  if (!(o.tol_inner > 0)) fail(at + "/tol_inner", "tol_inner must be positive");
  if (o.max_iter < 1) fail(at + "/max_iter", "max_iter must be at least 1");
  return o;
}

}  // namespace

json to_json(const ChannelFamily& family) {
  switch (family.kind()) {
    case FamilyKind::Discrete:
      return {{"kind", "discrete"}, {"size", family.size()}};
    case FamilyKind::Poisson:
      return {{"kind", "poisson"}};
    case FamilyKind::Gaussian:
      if (family.identity_covariance()) return {{"kind", "gaussian-identity"}, {"dim", family.size()}};
      return {{"kind", "gaussian"}, {"sigma", mat_json(family.sigma())}};
  }
  return {};
}

ChannelFamily family_from_json(const json& j, const std::string& at) {
  const std::string kind = kind_of(j, at);
  return anchored(at, [&] {
    if (kind == "discrete") return ChannelFamily::discrete(integer(field(j, "size", at), at + "/size"));
    if (kind == "poisson") return ChannelFamily::poisson();
    if (kind == "gaussian") return ChannelFamily::gaussian(matrix(field(j, "sigma", at), at + "/sigma"));
    if (kind == "gaussian-identity")
      return ChannelFamily::gaussian_identity(integer(field(j, "dim", at), at + "/dim"));
    fail(at + "/kind", "unknown family kind \"" + kind +
                           "\" (expected discrete, poisson, gaussian, gaussian-identity)");
  });
}

json to_json(const SignalSet& set) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Interval>) {
          return {{"kind", "interval"}, {"lo", s.lo}, {"hi", s.hi}};
        } else if constexpr (std::is_same_v<T, Box>) {
          return {{"kind", "box"}, {"lo", vec_json(s.lo)}, {"hi", vec_json(s.hi)}};
        } else if constexpr (std::is_same_v<T, Simplex>) {
          return {{"kind", "simplex"}, {"dim", s.dim}, {"scale", s.scale}, {"margin", s.margin}};
        } else {
          json v = json::array();
          for (const auto& p : s.vertices) v.push_back(vec_json(p));
          return {{"kind", "vpolytope"}, {"vertices", v}};
        }
      },
      set.shape());
}

SignalSet set_from_json(const json& j, const std::string& at) {
  const std::string kind = kind_of(j, at);
  return anchored(at, [&] {
    if (kind == "interval")
      return SignalSet::interval(number(field(j, "lo", at), at + "/lo"),
                                 number(field(j, "hi", at), at + "/hi"));
    if (kind == "box")
      return SignalSet::box(vector(field(j, "lo", at), at + "/lo"), vector(field(j, "hi", at), at + "/hi"));
    if (kind == "simplex") {
      const double scale = j.contains("scale") ? number(j["scale"], at + "/scale") : 1.0;
      const double margin = j.contains("margin") ? number(j["margin"], at + "/margin") : 0.0;
      return SignalSet::simplex(integer(field(j, "dim", at), at + "/dim"), scale, margin);
    }
    if (kind == "vpolytope") {
      const json& v = field(j, "vertices", at);
      if (!v.is_array()) fail(at + "/vertices", "expected an array of points");
      std::vector<Vec> pts;
      for (std::size_t i = 0; i < v.size(); ++i)
        pts.push_back(vector(v[i], at + "/vertices/" + std::to_string(i)));
      return SignalSet::vpolytope(std::move(pts));
    }
    fail(at + "/kind", "unknown set kind \"" + kind + "\" (expected interval, box, simplex, vpolytope)");
  });
}

json to_json(const EstimationProblem& problem) {
  json j;
  bool same = true;
  for (const auto& grp : problem.groups) same = same && grp.family == problem.groups[0].family;
  if (same && !problem.groups.empty()) {
    j["family"] = to_json(problem.groups[0].family);
  } else {
    json factors = json::array();
    for (const auto& grp : problem.groups) factors.push_back(to_json(grp.family));
    j["family"] = {{"kind", "product"}, {"factors", factors}};
  }
  json maps = json::array();
  for (const auto& grp : problem.groups)
    maps.push_back({{"A", mat_json(grp.map.A)}, {"b", vec_json(grp.map.b)}, {"count", grp.count}});
  j["maps"] = maps;
  j["set"] = to_json(problem.set);
  j["g"] = vec_json(problem.g);
  j["epsilon"] = problem.epsilon;
  return j;
}

EstimationProblem problem_from_json(const json& j) {
  EstimationProblem p;
  const std::vector<ChannelFamily> fams = factor_families(field(j, "family", ""), "/family");
  const bool product = fams.size() > 1 || kind_of(j["family"], "/family") == "product";
  const json& maps = field(j, "maps", "");
  if (!maps.is_array() || maps.empty()) fail("/maps", "expected a non-empty array of maps");
  if (product && maps.size() != fams.size())
    fail("/maps", "product family needs one map per factor (" + std::to_string(fams.size()) + ")");
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const std::string at = "/maps/" + std::to_string(i);
    ChannelGroup grp{product ? fams[i] : fams[0], {}, 1};
    grp.map.A = matrix(field(maps[i], "A", at), at + "/A");
    grp.map.b = maps[i].contains("b") ? vector(maps[i]["b"], at + "/b") : Vec::Zero(grp.map.A.rows());
    if (maps[i].contains("count")) grp.count = integer(maps[i]["count"], at + "/count");
    p.groups.push_back(std::move(grp));
  }
  if (j.contains("channels")) {
    if (p.groups.size() != 1) fail("/channels", "\"channels\" applies only to a single map");
    p.groups[0].count = integer(j["channels"], "/channels");
  }
  p.set = set_from_json(field(j, "set", ""), "/set");
  p.g = vector(field(j, "g", ""), "/g");
  p.epsilon = number(field(j, "epsilon", ""), "/epsilon");
  for (std::size_t i = 0; i < p.groups.size(); ++i)
    if (p.groups[i].map.b.size() != p.groups[i].map.A.rows())
      fail("/maps/" + std::to_string(i) + "/b", "offset length must equal the number of rows of A");

  try {
    p.validate();
  } catch (const InvalidInput& e) {
    const std::string msg = e.what();
    std::string at = "/maps";
    if (msg.rfind("epsilon", 0) == 0) at = "/epsilon";
    else if (msg.rfind("functional", 0) == 0) at = "/g";
    else if (msg.rfind("channel group ", 0) == 0) at = "/maps/" + msg.substr(14, msg.find(':') - 14);
    fail(at, msg);
  }
  return p;
}

std::string problem_fingerprint(const EstimationProblem& problem) {
  const std::string text = to_json(problem).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json to_json(const AffineEstimator& est) {
  json factors = json::array();
  json phi = json::array();
  for (int k = 0; k < est.spec.num_factors(); ++k) {
    json f = to_json(est.spec.factors()[k].family);
    f["count"] = est.spec.factors()[k].count;
    factors.push_back(f);
    phi.push_back(vec_json(est.phi.parts[k]));
  }
  return {{"factors", factors},       {"phi", phi},
          {"c", est.c},               {"risk_bound", est.risk_bound},
          {"epsilon", est.epsilon},   {"alpha", est.alpha},
          {"upper", est.upper},       {"dual", est.dual},
          {"gap", est.gap},           {"certified", est.certified},
          {"fingerprint", est.fingerprint}};
}

AffineEstimator estimator_from_json(const json& j) {
  AffineEstimator est;
  const json& factors = field(j, "factors", "");
  const json& phi = field(j, "phi", "");
  if (!factors.is_array() || !phi.is_array() || factors.size() != phi.size())
    fail("/phi", "need one test function per factor");
  std::vector<FamilyFactor> ff;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    const std::string at = "/factors/" + std::to_string(k);
    ChannelFamily fam = family_from_json(factors[k], at);
    const int count = integer(field(factors[k], "count", at), at + "/count");
    Vec coef = vector(phi[k], "/phi/" + std::to_string(k));
    if (coef.size() != fam.coef_dim())
      fail("/phi/" + std::to_string(k), "expected " + std::to_string(fam.coef_dim()) + " coefficients");
    ff.push_back({std::move(fam), count});
    est.phi.parts.push_back(std::move(coef));
  }
  est.spec = FamilySpec(std::move(ff));
  est.c = number(field(j, "c", ""), "/c");
  est.risk_bound = number(field(j, "risk_bound", ""), "/risk_bound");
  est.epsilon = number(field(j, "epsilon", ""), "/epsilon");
  if (j.contains("alpha")) est.alpha = number(j["alpha"], "/alpha");
  if (j.contains("upper")) est.upper = number(j["upper"], "/upper");
  if (j.contains("dual")) est.dual = number(j["dual"], "/dual");
  if (j.contains("gap")) est.gap = number(j["gap"], "/gap");
  if (j.contains("certified")) est.certified = j["certified"].get<bool>();
  if (j.contains("fingerprint")) est.fingerprint = j["fingerprint"].get<std::string>();
  return est;
}

json to_json(const SaddleSolution& sol) {
  json phi = json::array();
  for (const auto& p : sol.phi.parts) phi.push_back(vec_json(p));
  return {{"phi", phi},          {"alpha", sol.alpha},      {"upper", sol.upper},
          {"dual", sol.dual},    {"gap", sol.gap},          {"r", sol.r},
          {"iterations", sol.iterations}, {"x_bar", vec_json(sol.x_bar)},
          {"y_bar", vec_json(sol.y_bar)}, {"certified", sol.certified}};
}

json to_json(const PetModel& model) {
  return {{"family", {{"kind", "pet"}}}, {"q", mat_json(model.q)},
          {"set", to_json(model.set)},   {"g", vec_json(model.g)},
          {"epsilon", model.epsilon}};
}

PetModel pet_model_from_json(const json& j) {
  PetModel m;
  m.q = matrix(field(j, "q", ""), "/q");
  m.set = set_from_json(field(j, "set", ""), "/set");
  m.g = vector(field(j, "g", ""), "/g");
  m.epsilon = number(field(j, "epsilon", ""), "/epsilon");
  anchored("/q", [&] {
    m.validate();
    return 0;
  });
  return m;
}

GaussianProblem gaussian_problem_from_json(const json& j) {
  const json& fam = field(j, "family", "");
  if (kind_of(fam, "/family") != "gaussian-identity")
    fail("/family/kind", "the gaussian pipeline needs family kind \"gaussian-identity\"");
  const json& maps = field(j, "maps", "");
  if (!maps.is_array() || maps.size() != 1) fail("/maps", "the gaussian pipeline needs exactly one map");
  GaussianProblem gp;
  gp.A = matrix(field(maps[0], "A", "/maps/0"), "/maps/0/A");
  if (maps[0].contains("b") && vector(maps[0]["b"], "/maps/0/b").cwiseAbs().maxCoeff() != 0.0)
    fail("/maps/0/b", "the gaussian pipeline needs a zero offset");
  if ((maps[0].contains("count") && maps[0]["count"] != 1) || (j.contains("channels") && j["channels"] != 1))
    fail("/maps/0/count", "the gaussian pipeline needs a single channel");
  const int dim = integer(field(fam, "dim", "/family"), "/family/dim");
  if (dim != gp.A.rows()) fail("/family/dim", "dim must equal the number of rows of A");
  gp.set = set_from_json(field(j, "set", ""), "/set");
  gp.g = vector(field(j, "g", ""), "/g");
  gp.epsilon = number(field(j, "epsilon", ""), "/epsilon");
  try {
    gp.validate();
  } catch (const InvalidInput& e) {
    const std::string msg = e.what();
    fail(msg.find("epsilon") != std::string::npos ? "/epsilon" : "/maps/0/A", msg);
  }
  return gp;
}

std::vector<Vec> observations_from_json(const json& j) {
  const json& obs = j.is_object() ? field(j, "observations", "") : j;
  if (!obs.is_array()) fail("/observations", "expected an array with one entry per channel");
  std::vector<Vec> out;
  for (std::size_t i = 0; i < obs.size(); ++i)
    out.push_back(vector(obs[i], "/observations/" + std::to_string(i)));
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(path + ":" + std::to_string(line_of(text, e.byte > 0 ? e.byte - 1 : 0)) +
                       ": malformed JSON: " + e.what());
  }
}

ProblemFile parse_problem_text(const std::string& text, const std::string& name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(name + ":" + std::to_string(line_of(text, e.byte > 0 ? e.byte - 1 : 0)) +
                       ": malformed JSON: " + e.what());
  }
  ProblemFile pf;
  try {
    if (!j.is_object()) fail("", "problem file must be a JSON object");
    pf.options = options_from_json(j, pf.seed);
    const std::string kind = j.contains("q") ? "pet" : kind_of(field(j, "family", ""), "/family");
    if (kind == "pet") {
      pf.kind = ProblemKind::Pet;
      pf.pet = pet_model_from_json(j);
      pf.problem = pf.pet.generic();
    } else if (kind == "gaussian-identity" && field(j, "maps", "").size() == 1 &&
               !j.contains("nested_sets")) {
      pf.kind = ProblemKind::Gaussian;
      pf.gaussian = gaussian_problem_from_json(j);
      pf.problem = pf.gaussian.generic();
    } else {
      pf.problem = problem_from_json(j);
    }
    if (j.contains("nested_sets")) {
      const json& ns = j["nested_sets"];
      if (!ns.is_array() || ns.empty()) fail("/nested_sets", "expected a non-empty array of sets");
      for (std::size_t i = 0; i < ns.size(); ++i)
        pf.nested_sets.push_back(set_from_json(ns[i], "/nested_sets/" + std::to_string(i)));
      if (j.contains("delta")) pf.delta = number(j["delta"], "/delta");
      if (j.contains("delta_prime")) pf.delta_prime = number(j["delta_prime"], "/delta_prime");
    }
  } catch (const SchemaError& e) {
    throw InvalidInput(name + ":" + std::to_string(locate(text, e.pointer())) + ": " + e.pointer() +
                       ": " + e.what());
  }
  return pf;
}

ProblemFile load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem_text(ss.str(), path);
}

}  // namespace affine_minimax

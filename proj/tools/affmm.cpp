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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "affine_minimax/adaptive.hpp"
#include "affine_minimax/gaussian.hpp"
#include "affine_minimax/io.hpp"
#include "affine_minimax/pet.hpp"
#include "affine_minimax/risk_lab.hpp"
#include "affine_minimax/table1.hpp"

using namespace affine_minimax;

namespace {

constexpr int kExitCertified = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUncertified = 2;

struct Common {
  double tol = -1.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  long reps = 100000;
  std::string out;
  std::string csv;
  std::string x_list;
  std::string obs;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidInput(path + ": cannot write file");
  out << text;
}

void write_json(const std::string& path, const json& j) {
  if (path.empty()) return;
  write_text(path, j.dump(2) + "\n");
}

ProblemFile load(const std::string& path, const Common& opts) {
  ProblemFile pf = load_problem_file(path);
  if (opts.tol > 0) pf.options.tol_rel = opts.tol;
  if (opts.seed_set) pf.seed = opts.seed;
  return pf;
}

/// An estimator together with the extremal pair of its dual certificate.
struct Solved {
  AffineEstimator est;
  Vec x_bar;
  Vec y_bar;
};

Solved solve_generic(const EstimationProblem& problem, const SolverOptions& options) {
  problem.validate();
  const double r = std::log(2.0 / problem.epsilon);
  SaddleSolution sol;
  try {
    sol = minimize_outer(problem, r, options);
  } catch (const SolverCapReached& cap) {
    sol = cap.best();
  }
  return {estimator_from_solution(problem, sol), sol.x_bar, sol.y_bar};
}

Solved solve_any(const ProblemFile& pf) {
  switch (pf.kind) {
    case ProblemKind::Gaussian: {
      Solved s{construct_gaussian(pf.gaussian, pf.options), {}, {}};
      const double radius = 2.0 * erfinv_tail(0.5 * pf.gaussian.epsilon);
      const DualResult d = hellinger_dual(pf.problem, radius * radius / 8.0, pf.options);
      s.x_bar = d.x;
      s.y_bar = d.y;
      return s;
    }
    case ProblemKind::Pet: {
      Solved s{pet_construct(pf.pet, pf.options), {}, {}};
      const DualResult d = hellinger_dual(pf.problem, std::log(2.0 / pf.pet.epsilon), pf.options);
      s.x_bar = d.x;
      s.y_bar = d.y;
      return s;
    }
    case ProblemKind::Generic:
      break;
  }
  return solve_generic(pf.problem, pf.options);
}

std::string summary(const ProblemFile& pf, const AffineEstimator& est) {
  std::ostringstream os;
  os << "risk_bound " << fmt(est.risk_bound) << "\n";
  os << "gap " << fmt(est.gap) << "\n";
  const double eps = est.epsilon;
  if (eps > 0 && eps < 0.25) {
    os << "theta " << fmt(theta_epsilon(eps)) << "\n";
    os << "lower_bound " << fmt(lower_bound_hellinger(pf.problem, pf.options)) << "\n";
  }
  os << (est.certified ? "certified" : "NOT certified: solver stopped above the gap tolerance")
     << "\n";
  return os.str();
}

std::vector<Vec> points_for(const ProblemFile& pf, const Solved& s, const Common& opts,
                            int random_points) {
  std::vector<Vec> pts;
  if (!opts.x_list.empty()) {
    const json j = read_json_file(opts.x_list);
    const json& arr = j.is_object() ? j.at("points") : j;
    for (const auto& p : arr) {
      std::vector<double> v = p.is_array() ? p.get<std::vector<double>>()
                                           : std::vector<double>{p.get<double>()};
      pts.push_back(Eigen::Map<Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    return pts;
  }
  pts.push_back(s.x_bar);
  for (int i = 0; i < random_points; ++i) {
    Philox rng(pf.seed, 1u << 20, static_cast<std::uint32_t>(i));
    pts.push_back(pf.problem.set.random_point(rng));
  }
  return pts;
}

json report_json(const RiskReport& rep) {
  json pts = json::array();
  for (const auto& p : rep.points)
    pts.push_back({{"x", std::vector<double>(p.x.data(), p.x.data() + p.x.size())},
                   {"truth", p.truth},
                   {"violations", p.violations},
                   {"reps", p.reps},
                   {"frequency", p.frequency},
                   {"wilson_upper", p.wilson_upper},
                   {"mean_abs_error", p.mean_abs_error},
                   {"max_abs_error", p.max_abs_error}});
  return {{"threshold", rep.threshold},
          {"epsilon", rep.epsilon},
          {"n_reps", rep.n_reps},
          {"worst_frequency", rep.worst_frequency},
          {"worst_wilson_upper", rep.worst_wilson_upper},
          {"passed", rep.passed()},
          {"all_below_epsilon", rep.all_below_epsilon()},
          {"points", pts}};
}

std::string histogram_csv(const RiskReport& rep) {
  std::ostringstream os;
  os << "point,bin_lo,bin_hi,count\n";
  for (std::size_t j = 0; j < rep.points.size(); ++j) {
    const auto& h = rep.points[j].histogram;
    const double w = h.hi / static_cast<double>(h.counts.size());
    for (std::size_t b = 0; b < h.counts.size(); ++b)
      os << j << "," << fmt(b * w) << "," << fmt((b + 1) * w) << "," << h.counts[b] << "\n";
    os << j << "," << fmt(h.hi) << ",inf," << h.overflow << "\n";
  }
  return os.str();
}

int cmd_solve(const std::string& file, const Common& opts, bool gaussian_only) {
  const ProblemFile pf = load(file, opts);
  if (gaussian_only && pf.kind != ProblemKind::Gaussian)
    throw InvalidInput(file + ": the gaussian subcommand needs family kind \"gaussian-identity\" "
                              "with a single zero-offset map");
  const Solved s = solve_any(pf);
  write_json(opts.out, to_json(s.est));
  std::cout << summary(pf, s.est);
  if (!opts.obs.empty())
    std::cout << "estimate " << fmt(s.est.evaluate(observations_from_json(read_json_file(opts.obs))))
              << "\n";
  return s.est.certified ? kExitCertified : kExitUncertified;
}

int cmd_table1(const Common& opts) {
  SolverOptions so;
  if (opts.tol > 0) so.tol_rel = opts.tol;
  const auto& ref = table1_reference();
  std::ofstream csv;
  if (!opts.out.empty()) {
    csv.open(opts.out);
    if (!csv) throw InvalidInput(opts.out + ": cannot write file");
  }
  csv << "epsilon,L,gamma,delta,upper,lower,ratio,theta,"
         "published_gamma,published_delta,published_upper,published_lower,published_ratio,published_theta,"
         "rel_diff_upper,rel_diff_lower,rel_diff_ratio,certified\n";
  bool all_certified = true;
  std::printf("%-7s %-5s %-10s %-10s %-10s %-10s %-6s %-6s | published upper/lower/ratio\n", "eps", "L",
              "gamma", "delta", "upper", "lower", "ratio", "theta");
  for (const auto& p : ref) {
    Table1Row r;
    try {
      r = table1_cell(p.epsilon, p.L, so);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "cell (%g, %d) failed: %s\n", p.epsilon, p.L, e.what());
      return kExitUncertified;
    }
    auto rel = [](double a, double b) { return (a - b) / b; };
    csv << fmt(r.epsilon) << "," << r.L << "," << fmt(r.gamma) << "," << fmt(r.delta) << ","
        << fmt(r.upper) << "," << fmt(r.lower) << "," << fmt(r.ratio) << "," << fmt(r.theta) << ","
        << fmt(p.gamma) << "," << fmt(p.delta) << "," << fmt(p.upper) << "," << fmt(p.lower) << ","
        << fmt(p.ratio) << "," << fmt(p.theta) << "," << fmt(rel(r.upper, p.upper)) << ","
        << fmt(rel(r.lower, p.lower)) << "," << fmt(rel(r.ratio, p.ratio)) << ","
        << (r.certified ? 1 : 0) << "\n" << std::flush;
    std::printf("%-7g %-5d %-10.3e %-10.3e %-10.3e %-10.3e %-6.2f %-6.2f | %.2e %.2e %.2f\n",
                r.epsilon, r.L, r.gamma, r.delta, r.upper, r.lower, r.ratio, r.theta, p.upper,
                p.lower, p.ratio);
    all_certified = all_certified && r.certified;
  }
  return all_certified ? kExitCertified : kExitUncertified;
}

int cmd_mc(const std::string& file, const Common& opts) {
  const ProblemFile pf = load(file, opts);
  const Solved s = solve_any(pf);
  MonteCarloOptions mo;
  mo.n_reps = opts.reps;
  mo.seed = pf.seed;
  const RiskReport rep = mc_risk(pf.problem, s.est, points_for(pf, s, opts, 10), mo);
  json j = report_json(rep);
  j["estimator"] = to_json(s.est);
  write_json(opts.out, j);
  if (!opts.csv.empty()) write_text(opts.csv, histogram_csv(rep));
  std::printf("risk_bound %s\nworst_frequency %s\nworst_wilson_upper %s\ncoverage %s\n",
              fmt(rep.threshold).c_str(), fmt(rep.worst_frequency).c_str(),
              fmt(rep.worst_wilson_upper).c_str(), rep.passed() ? "holds (Wilson bound)" : "VIOLATED (Wilson bound)");
  std::cout << (s.est.certified ? "certified\n" : "NOT certified\n");
  return s.est.certified ? kExitCertified : kExitUncertified;
}

int cmd_adaptive(const std::string& file, const Common& opts) {
  const ProblemFile pf = load(file, opts);
  NestedProblem nested;
  nested.base = pf.problem;
  nested.sets = pf.nested_sets.empty() ? std::vector<SignalSet>{pf.problem.set} : pf.nested_sets;
  nested.delta = pf.delta;
  nested.delta_prime = pf.delta_prime;
  const AdaptiveEstimator ad = build_levels(nested, pf.options);

  json levels = json::array();
  std::ostringstream csv;
  csv << "level,phi_star,bound,risk_bound,gap,certified,flagged\n";
  bool certified = true;
  for (std::size_t k = 0; k < ad.levels.size(); ++k) {
    const auto& lvl = ad.levels[k];
    json e = to_json(lvl.estimator);
    e["phi_star"] = lvl.phi_star;
    e["bound"] = lvl.bound;
    e["flagged"] = lvl.flagged;
    levels.push_back(e);
    csv << k + 1 << "," << fmt(lvl.phi_star) << "," << fmt(lvl.bound) << ","
        << fmt(lvl.estimator.risk_bound) << "," << fmt(lvl.estimator.gap) << ","
        << (lvl.estimator.certified ? 1 : 0) << "," << (lvl.flagged ? 1 : 0) << "\n";
    certified = certified && lvl.estimator.certified;
    std::printf("level %zu phi_star %s bound %s %s\n", k + 1, fmt(lvl.phi_star).c_str(),
                fmt(lvl.bound).c_str(), lvl.estimator.certified ? "certified" : "NOT certified");
  }
  write_json(opts.out, {{"epsilon", ad.epsilon},
                        {"delta", ad.delta},
                        {"delta_prime", ad.delta_prime},
                        {"vartheta", ad.vartheta},
                        {"levels", levels}});
  if (!opts.csv.empty()) write_text(opts.csv, csv.str());
  std::printf("vartheta %s\n%s\n", fmt(ad.vartheta).c_str(), certified ? "certified" : "NOT certified");
  return certified ? kExitCertified : kExitUncertified;
}

int cmd_pet_demo(int grid, const Common& opts) {
  PetModel model = pet_demo_model(grid);
  SolverOptions so;
  if (opts.tol > 0) so.tol_rel = opts.tol;
  const std::uint64_t seed = opts.seed_set ? opts.seed : 1;
  const AffineEstimator est = pet_construct(model, so);
  const EstimationProblem generic = model.generic();
  const double lower = lower_bound_hellinger(generic, so);
  const double theta = theta_epsilon(model.epsilon);
  const DualResult d = hellinger_dual(generic, std::log(2.0 / model.epsilon), so);

  std::vector<Vec> pts{d.x};
  for (int i = 0; i < 10; ++i) {
    Philox rng(seed, 1u << 20, static_cast<std::uint32_t>(i));
    pts.push_back(model.set.random_point(rng));
  }
  MonteCarloOptions mo;
  mo.n_reps = opts.reps;
  mo.seed = seed;
  const RiskReport rep = mc_risk(generic, est, pts, mo);

  const bool sandwich = lower <= est.risk_bound && est.risk_bound <= theta * lower + 1e-4;
  json j = {{"model", to_json(model)},       {"estimator", to_json(est)},
            {"lower_bound", lower},          {"theta", theta},
            {"sandwich", sandwich},          {"monte_carlo", report_json(rep)}};
  write_json(opts.out, j);
  if (!opts.csv.empty()) {
    const Vec counts = pet_simulate(model, d.x, seed);
    std::ostringstream os;
    os << "bin,count\n";
    for (int l = 0; l < counts.size(); ++l) os << l << "," << static_cast<long>(counts[l]) << "\n";
    write_text(opts.csv, os.str());
  }
  std::printf("risk_bound %s\nlower_bound %s\ntheta %s\nsandwich %s\nworst_frequency %s\n%s\n",
              fmt(est.risk_bound).c_str(), fmt(lower).c_str(), fmt(theta).c_str(),
              sandwich ? "holds" : "VIOLATED", fmt(rep.worst_frequency).c_str(),
              est.certified ? "certified" : "NOT certified");
  return est.certified ? kExitCertified : kExitUncertified;
}

int cmd_lower_bound(const std::string& file, const Common& opts) {
  const ProblemFile pf = load(file, opts);
  const double lower = lower_bound_hellinger(pf.problem, pf.options);
  std::printf("lower_bound %s\ntheta %s\n", fmt(lower).c_str(), fmt(theta_epsilon(pf.problem.epsilon)).c_str());
  write_json(opts.out, {{"lower_bound", lower}, {"theta", theta_epsilon(pf.problem.epsilon)}});
  return kExitCertified;
}

int cmd_eval(const std::string& est_file, const std::string& obs_file) {
  const AffineEstimator est = estimator_from_json(read_json_file(est_file));
  const double v = est.evaluate(observations_from_json(read_json_file(obs_file)));
  std::printf("%s\n", fmt(v).c_str());
  return kExitCertified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-minimax affine estimation of linear functionals"};
  app.require_subcommand(1);
  Common opts;
  std::string file, est_file, obs_file;
  int grid = 2;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--tol", opts.tol, "relative gap tolerance");
    sub->add_option("--out", opts.out, "output JSON (CSV for table1)");
  };
  auto add_mc = [&](CLI::App* sub) {
    sub->add_option("--reps", opts.reps, "Monte Carlo replications")->check(CLI::Range(1L, 1000000000L));
    sub->add_option("--x-list", opts.x_list, "JSON list of signals to test");
    sub->add_option("--csv", opts.csv, "plot-ready CSV output");
  };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) {
      opts.seed = s;
      opts.seed_set = true;
    }, "random seed");
  };

  auto* solve = app.add_subcommand("solve", "build the affine estimator for a problem file");
  solve->add_option("problem", file)->required()->check(CLI::ExistingFile);
  add_common(solve);
  add_seed(solve);
  solve->add_option("--obs", opts.obs, "observations to evaluate the estimator on")->check(CLI::ExistingFile);

  auto* gauss = app.add_subcommand("gaussian", "closed-form Gaussian estimator");
  gauss->add_option("problem", file)->required()->check(CLI::ExistingFile);
  add_common(gauss);
  add_seed(gauss);
  gauss->add_option("--obs", opts.obs, "observations to evaluate the estimator on")->check(CLI::ExistingFile);

  auto* table = app.add_subcommand("table1", "reproduce the Bernoulli table");
  add_common(table);

  auto* mc = app.add_subcommand("mc", "Monte Carlo epsilon-risk of the constructed estimator");
  mc->add_option("problem", file)->required()->check(CLI::ExistingFile);
  add_common(mc);
  add_seed(mc);
  add_mc(mc);

  auto* adaptive = app.add_subcommand("adaptive", "adaptive estimator over nested sets");
  adaptive->add_option("problem", file)->required()->check(CLI::ExistingFile);
  add_common(adaptive);
  add_seed(adaptive);
  adaptive->add_option("--csv", opts.csv, "per-level CSV output");

  auto* pet = app.add_subcommand("pet-demo", "emission tomography demo on a grid phantom");
  pet->add_option("--grid", grid, "grid size")->check(CLI::Range(1, 6));
  add_common(pet);
  add_seed(pet);
  add_mc(pet);

  auto* lower = app.add_subcommand("lower-bound", "Hellinger lower bound on the minimax risk");
  lower->add_option("problem", file)->required()->check(CLI::ExistingFile);
  add_common(lower);

  auto* eval = app.add_subcommand("eval", "evaluate a saved estimator on observations");
  eval->add_option("estimator", est_file)->required()->check(CLI::ExistingFile);
  eval->add_option("observations", obs_file)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*solve) return cmd_solve(file, opts, false);
    if (*gauss) return cmd_solve(file, opts, true);
    if (*table) return cmd_table1(opts);
    if (*mc) return cmd_mc(file, opts);
    if (*adaptive) return cmd_adaptive(file, opts);
    if (*pet) return cmd_pet_demo(grid, opts);
    if (*lower) return cmd_lower_bound(file, opts);
    if (*eval) return cmd_eval(est_file, obs_file);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUncertified;
  }
  return kExitInvalid;
}

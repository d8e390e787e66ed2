// Command-line front end: rigidity queries, single solves, experiment grids
// and direction-estimation comparisons.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lud/error.h"
#include "lud/eval.h"
#include "lud/formation.h"
#include "lud/harness.h"
#include "lud/io.h"
#include "lud/random.h"
#include "lud/rigidity.h"
#include "lud/solvers.h"

namespace {

using lud::ErrorCode;
using lud::ExperimentKind;
using lud::ExperimentSpec;

constexpr int kExitSpec = 2;
constexpr int kExitNonRigid = 3;
constexpr int kExitNumerical = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSpec:
    case ErrorCode::kParse:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kOracleSize:
    case ErrorCode::kTrivialInput:
      return kExitSpec;
    default:
      return kExitNumerical;
  }
}

// Flags shared by every subcommand. Unset optionals leave the spec file (or
// the built-in default) alone.
struct Common {
  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, Common* c) {
  cmd->add_option("--spec", c->spec_path, "JSON experiment spec; flags override it")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", c->seed, "Master seed");
  cmd->add_option("--out", c->out, "Output path");
  cmd->add_option("--threads", c->threads, "Worker threads");
}

ExperimentSpec base_spec(const Common& c, ExperimentKind kind) {
  ExperimentSpec spec;
  if (!c.spec_path.empty()) {
    spec = lud::load_experiment_spec(c.spec_path);
    if (spec.kind != kind) {
      throw lud::Error(ErrorCode::kSpec, std::string("spec kind is '") +
                                             lud::to_string(spec.kind) + "', expected '" +
                                             lud::to_string(kind) + "'");
    }
  }
  spec.kind = kind;
  if (c.seed) spec.seed = *c.seed;
  if (c.out) spec.out = *c.out;
  if (c.threads) spec.threads = *c.threads;
  return spec;
}

template <typename T>
void override(T* field, const std::optional<T>& value) {
  if (value) *field = *value;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw lud::Error(ErrorCode::kSpec, "cannot write '" + path + "'");
  return out;
}

lud::Formation load_checked(const std::string& path, std::optional<int> dim) {
  if (path.empty()) throw lud::Error(ErrorCode::kSpec, "no formation file given");
  lud::Formation f = lud::load_formation(path);
  if (dim && *dim != f.dimension()) {
    throw lud::Error(ErrorCode::kSpec, "--dim " + std::to_string(*dim) +
                                           " does not match the formation dimension " +
                                           std::to_string(f.dimension()));
  }
  return f;
}

struct RigidityArgs {
  Common common;
  std::optional<std::string> formation;
  std::optional<int> dim;
  bool oracle = false;
};

int run_rigidity(const RigidityArgs& a) {
  ExperimentSpec spec = base_spec(a.common, ExperimentKind::kRigidity);
  override(&spec.formation, a.formation);
  if (a.oracle) spec.oracle = true;
  lud::validate_experiment_spec(spec);
  const lud::Formation f = load_checked(spec.formation, a.dim);
  const int d = f.dimension();
  const auto report = lud::extract_maximal_components(
      f.graph(), d, lud::derive_seed(spec.seed, lud::Stream::kRealization));
  std::cout << (report.is_parallel_rigid ? "rigid" : "not-rigid") << " d=" << d
            << " n=" << f.num_vertices() << " m=" << f.num_edges()
            << " rank=" << report.measured_rank << "/" << report.required_rank
            << " components=" << report.components.size() << "\n";
  for (std::size_t k = 0; k < report.components.size(); ++k) {
    std::cout << "component " << k << ":";
    for (int v : report.components[k]) std::cout << ' ' << v;
    std::cout << "\n";
  }
  if (spec.oracle) {
    const bool combinatorial = lud::theorem1_oracle(f.graph(), d);
    std::cout << "oracle " << (combinatorial ? "rigid" : "not-rigid")
              << (combinatorial == report.is_parallel_rigid ? " (agrees)" : " (DISAGREES)")
              << "\n";
  }
  return report.is_parallel_rigid ? 0 : kExitNonRigid;
}

struct SolveArgs {
  Common common;
  std::optional<std::string> formation, method, trace, truth;
  std::optional<int> dim;
};

int run_solve(const SolveArgs& a) {
  ExperimentSpec spec = base_spec(a.common, ExperimentKind::kSolve);
  override(&spec.formation, a.formation);
  override(&spec.method, a.method);
  override(&spec.trace, a.trace);
  override(&spec.truth, a.truth);
  lud::validate_experiment_spec(spec);
  const lud::Formation f = load_checked(spec.formation, a.dim);

  lud::SolverConfig config = spec.solver;
  config.seed = spec.seed;
  const lud::SolverResult res = spec.method == "lud"   ? lud::solve_lud(f, config)
                                : spec.method == "cls" ? lud::solve_cls(f, config)
                                                       : lud::solve_ls(f, config);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";

  if (!spec.out.empty()) lud::save_locations(spec.out, res.locations);
  if (!spec.trace.empty()) {
    std::ofstream out = open_output(spec.trace);
    out << "iter,objective,regularized_objective,max_weight,min_dij\n";
    for (const auto& r : res.trace) {
      out << r.iter << ',' << lud::format_double(r.objective) << ','
          << lud::format_double(r.regularized_objective) << ','
          << lud::format_double(r.max_weight) << ',' << lud::format_double(r.min_pair_scale)
          << '\n';
    }
  }
  std::cout << "method=" << spec.method << " converged=" << (res.converged ? 1 : 0)
            << " iterations=" << res.iterations
            << " well_posed=" << (res.not_well_posed ? 0 : 1);
  if (!res.trace.empty()) {
    std::cout << " objective=" << lud::format_double(res.trace.back().objective);
  }
  if (!spec.truth.empty()) {
    const auto aligned = lud::align_scale_translation(res.locations, lud::load_locations(spec.truth));
    std::cout << " nrmse=" << lud::format_double(aligned.nrmse);
    if (aligned.sign_mismatch) std::cerr << "warning: estimate and truth have opposite sign\n";
  }
  std::cout << "\n";
  if (spec.out.empty()) lud::write_locations(std::cout, res.locations);
  return 0;
}

struct GridArgs {
  Common common;
  std::optional<int> dim, n, trials, max_retries;
  std::optional<std::vector<double>> q, p, sigma;
  std::optional<std::vector<std::string>> solvers;
};

void add_grid_options(CLI::App* cmd, GridArgs* a) {
  add_common(cmd, &a->common);
  cmd->add_option("--dim", a->dim, "Dimension d");
  cmd->add_option("--n", a->n, "Number of locations");
  cmd->add_option("--q", a->q, "Edge probabilities");
  cmd->add_option("--p", a->p, "Outlier probabilities");
  cmd->add_option("--sigma", a->sigma, "Gaussian noise levels");
  cmd->add_option("--trials", a->trials, "Trials per cell");
  cmd->add_option("--max-retries", a->max_retries, "Non-rigid redraws allowed per trial");
}

ExperimentSpec grid_spec(const GridArgs& a, ExperimentKind kind) {
  ExperimentSpec spec = base_spec(a.common, kind);
  override(&spec.dimension, a.dim);
  override(&spec.n, a.n);
  override(&spec.q, a.q);
  override(&spec.p, a.p);
  override(&spec.sigma, a.sigma);
  override(&spec.trials, a.trials);
  override(&spec.max_retries, a.max_retries);
  override(&spec.solvers, a.solvers);
  lud::validate_experiment_spec(spec);
  return spec;
}

int emit_grid(const ExperimentSpec& spec, const lud::GridResult& result) {
  if (spec.out.empty()) {
    lud::write_cells_csv(std::cout, spec, result);
    return 0;
  }
  std::ofstream cells = open_output(spec.out);
  lud::write_cells_csv(cells, spec, result);
  std::ofstream instances = open_output(spec.out + ".instances.csv");
  lud::write_instances_csv(instances, spec, result);
  return 0;
}

struct DirectionsArgs {
  Common common;
  std::optional<std::uint64_t> scene_seed;
  std::optional<int> cameras, points, trials;
  std::optional<std::vector<double>> rot_noise, outlier_frac;
  std::optional<std::vector<std::string>> method;
};

int run_directions(const DirectionsArgs& a) {
  ExperimentSpec spec = base_spec(a.common, ExperimentKind::kDirections);
  override(&spec.seed, a.scene_seed);
  override(&spec.cameras, a.cameras);
  override(&spec.points, a.points);
  override(&spec.trials, a.trials);
  override(&spec.rot_noise, a.rot_noise);
  override(&spec.outlier_frac, a.outlier_frac);
  override(&spec.methods, a.method);
  if (a.common.spec_path.empty() && !a.trials) spec.trials = 1;
  lud::validate_experiment_spec(spec);
  const auto result = lud::run_directions_compare(spec);
  if (spec.out.empty()) {
    lud::write_direction_summary_csv(std::cout, spec, result);
    return 0;
  }
  std::ofstream pairs = open_output(spec.out);
  lud::write_pairs_csv(pairs, spec, result);
  std::ofstream summary = open_output(spec.out + ".summary.csv");
  lud::write_direction_summary_csv(summary, spec, result);
  return 0;
}

struct GenerateArgs {
  int n = 20;
  int dim = 3;
  double q = 0.5;
  double p = 0.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string out;
  std::string truth_out;
};

int run_generate(const GenerateArgs& a) {
  using lud::Stream;
  const lud::Graph g = lud::generate_erdos_renyi(a.n, a.q, lud::derive_seed(a.seed, Stream::kGraph));
  const lud::LocationSet truth =
      lud::random_locations(a.n, a.dim, lud::derive_seed(a.seed, Stream::kLocations));
  const lud::Formation f = lud::corrupt_directions(
      lud::exact_directions(truth, g), {a.p, a.sigma, lud::derive_seed(a.seed, Stream::kNoise)});
  lud::save_formation(a.out, f);
  if (!a.truth_out.empty()) lud::save_locations(a.truth_out, truth);
  std::cout << "n=" << a.n << " m=" << f.num_edges() << " connected="
            << (g.is_connected() ? 1 : 0) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Location estimation from pairwise directions (LUD / CLS / LS)"};
  app.require_subcommand(1);

  RigidityArgs rig;
  auto* rigidity = app.add_subcommand("rigidity", "Parallel rigidity test and maximal components");
  add_common(rigidity, &rig.common);
  rigidity->add_option("--formation", rig.formation, "Formation file")->check(CLI::ExistingFile);
  rigidity->add_option("--dim", rig.dim, "Expected dimension (must match the file)");
  rigidity->add_flag("--oracle", rig.oracle, "Also run the combinatorial test (n <= 8)");
  rigidity->footer(
      "Prints 'rigid|not-rigid d= n= m= rank=r/required components=k', then one\n"
      "'component k: v...' line per maximal parallel rigid component.\n"
      "Exit status 0 rigid, 3 not rigid.");

  SolveArgs sol;
  auto* solve = app.add_subcommand("solve", "Estimate locations from a formation");
  add_common(solve, &sol.common);
  solve->add_option("--formation", sol.formation, "Formation file")->check(CLI::ExistingFile);
  solve->add_option("--method", sol.method, "lud | cls | ls")
      ->check(CLI::IsMember({"lud", "cls", "ls"}));
  solve->add_option("--dim", sol.dim, "Expected dimension (must match the file)");
  solve->add_option("--trace", sol.trace, "Per-iteration trace CSV");
  solve->add_option("--truth", sol.truth, "Ground-truth locations file; reports NRMSE")
      ->check(CLI::ExistingFile);
  solve->footer(
      "--out writes a locations file (header 'd n', one point per line).\n"
      "Trace CSV columns: iter,objective,regularized_objective,max_weight,min_dij\n"
      "(objective is sum |r| for LUD and sum |r|^2 for CLS and LS).");

  GridArgs pg;
  auto* phase = app.add_subcommand("phase-grid", "Exact-recovery grid over (q, p) with LUD");
  add_grid_options(phase, &pg);
  phase->footer(
      "<out> columns: q,p,sigma,solver,trials_recorded,unattainable,mean_nrmse,\n"
      "  log10_mean_nrmse,exact_recoveries\n"
      "<out>.instances.csv columns: q,p,sigma,trial,attempt,graph_seed,location_seed,\n"
      "  noise_seed,num_edges,solver,nrmse,converged,iterations\n"
      "Without --out the cell table goes to stdout.");

  GridArgs cmp;
  auto* compare = app.add_subcommand("compare", "LUD vs CLS vs LS on identical instances");
  add_grid_options(compare, &cmp);
  compare->add_option("--solvers", cmp.solvers, "Subset of lud cls ls");
  compare->footer(
      "<out> columns: per-cell means, as for phase-grid, one row per solver.\n"
      "<out>.instances.csv: long format, one row per (cell, trial, solver).");

  DirectionsArgs dir;
  auto* directions = app.add_subcommand("directions", "Robust vs PCA pairwise direction estimates");
  add_common(directions, &dir.common);
  directions->add_option("--scene-seed", dir.scene_seed, "Scene seed (same as --seed)");
  directions->add_option("--cameras", dir.cameras, "Cameras per scene");
  directions->add_option("--points", dir.points, "Scene points");
  directions->add_option("--trials", dir.trials, "Scenes (default 1 without --spec)");
  directions->add_option("--rot-noise", dir.rot_noise, "Rotation perturbation angles (rad)");
  directions->add_option("--outlier-frac", dir.outlier_frac, "Outlier sample fractions");
  directions->add_option("--method", dir.method, "robust | pca (repeatable)")
      ->check(CLI::IsMember({"robust", "pca"}));
  directions->footer(
      "<out> columns: trial,rot_noise,outlier_frac,method,i,j,num_inliers,num_outliers,\n"
      "  gamma_x,gamma_y,gamma_z,angular_error_to_truth_rad,condition_flag\n"
      "<out>.summary.csv columns: rot_noise,outlier_frac,method,num_pairs,skipped_pairs,\n"
      "  median_rad,p90_rad,bin_0..bin_49 (50 bins over [0, pi/4])\n"
      "Without --out the summary goes to stdout.");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a random synthetic formation");
  generate->add_option("--n", gen.n, "Number of locations")->capture_default_str();
  generate->add_option("--dim", gen.dim, "Dimension")->capture_default_str();
  generate->add_option("--q", gen.q, "Edge probability")->capture_default_str();
  generate->add_option("--p", gen.p, "Outlier probability")->capture_default_str();
  generate->add_option("--sigma", gen.sigma, "Gaussian noise level")->capture_default_str();
  generate->add_option("--seed", gen.seed, "Seed")->capture_default_str();
  generate->add_option("--out", gen.out, "Formation file")->required();
  generate->add_option("--truth-out", gen.truth_out, "Ground-truth locations file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitSpec;
  }

  try {
    if (*rigidity) return run_rigidity(rig);
    if (*solve) return run_solve(sol);
    if (*phase) {
      const ExperimentSpec spec = grid_spec(pg, ExperimentKind::kPhaseGrid);
      return emit_grid(spec, lud::run_phase_grid(spec));
    }
    if (*compare) {
      const ExperimentSpec spec = grid_spec(cmp, ExperimentKind::kCompare);
      return emit_grid(spec, lud::run_compare(spec));
    }
    if (*directions) return run_directions(dir);
    if (*generate) return run_generate(gen);
  } catch (const lud::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitSpec;
}

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "lud/solvers.h"

namespace lud {

enum class ExperimentKind { kPhaseGrid, kCompare, kDirections, kSolve, kRigidity };

const char* to_string(ExperimentKind kind);

// One experiment, read from a JSON object. Keys (all optional except kind):
//   kind            "phase-grid" | "compare" | "directions" | "solve" | "rigidity"
//   d, n            dimension and number of locations
//   q, p, sigma     grids (number or array)
//   trials, seed, solvers ("lud" | "cls" | "ls"), out, threads, max_retries
//   exact_threshold NRMSE counted as exact recovery
//   solver          {scale_floor, irls_delta, irls_tol, max_outer_iters,
//                    inner_tol, inner_max_iters}
//   cameras, points, rot_noise, outlier_frac, methods ("robust" | "pca")
//   formation, truth, trace, method, oracle   (solve and rigidity)
// Unknown keys are rejected.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kPhaseGrid;
  int dimension = 3;
  int n = 100;
  std::vector<double> q = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> p = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> sigma = {0.0};
  int trials = 10;
  std::uint64_t seed = 0;
  std::vector<std::string> solvers = {"lud"};
  std::string out;
  int threads = 1;
  // Regenerations allowed per trial before a non-rigid draw marks the cell
  // unattainable.
  int max_retries = 20;
  double exact_threshold = 1e-6;
  SolverConfig solver;

  int cameras = 20;
  int points = 100;
  std::vector<double> rot_noise = {0.0};
  std::vector<double> outlier_frac = {0.3};
  std::vector<std::string> methods = {"robust", "pca"};

  // Single-instance commands (solve, rigidity).
  std::string formation;
  std::string truth;
  std::string trace;
  std::string method = "lud";
  bool oracle = false;
};

// Throws kSpec on malformed JSON, unknown keys, wrong types or values out of
// range.
ExperimentSpec parse_experiment_spec(const std::string& json_text);
ExperimentSpec load_experiment_spec(const std::string& path);
// Checks ranges; parse_experiment_spec calls it, CLI overrides call it again.
void validate_experiment_spec(const ExperimentSpec& spec);

// Runs fn(0) .. fn(count - 1) on up to `threads` workers. The first exception
// thrown by fn is rethrown after all workers stop.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

// One solved instance. The graph and locations depend on (q, trial, attempt)
// only, so every p and sigma of a trial shares them; the corruption depends
// on the whole cell.
struct InstanceRecord {
  double q = 0.0;
  double p = 0.0;
  double sigma = 0.0;
  int trial = 0;
  // Number of non-rigid draws skipped before this instance.
  int attempt = 0;
  std::uint64_t graph_seed = 0;
  std::uint64_t location_seed = 0;
  std::uint64_t noise_seed = 0;
  int num_edges = 0;
  std::string solver;
  double nrmse = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct CellSummary {
  double q = 0.0;
  double p = 0.0;
  double sigma = 0.0;
  std::string solver;
  int trials_recorded = 0;
  // Some trial found no rigid graph within max_retries.
  bool unattainable = false;
  double mean_nrmse = 0.0;
  int exact_recoveries = 0;
};

struct GridResult {
  // Sorted by (q, p, sigma, solver).
  std::vector<CellSummary> cells;
  // Sorted by (q, p, sigma, trial, solver).
  std::vector<InstanceRecord> instances;
};

// LUD on every (q, p, sigma) cell, rigid instances only. spec.solvers is
// ignored.
GridResult run_phase_grid(const ExperimentSpec& spec);

// Every listed solver on identical formations for every (q, p, sigma) cell.
GridResult run_compare(const ExperimentSpec& spec);

struct PairRecord {
  int trial = 0;
  double rot_noise = 0.0;
  double outlier_frac = 0.0;
  std::string method;
  int i = 0;
  int j = 0;
  int num_inliers = 0;
  int num_outliers = 0;
  // Signed estimate of (t_i - t_j) / |t_i - t_j|.
  Eigen::Vector3d gamma = Eigen::Vector3d::Zero();
  double angular_error = 0.0;
  double condition = 0.0;
};

inline constexpr int kHistogramBins = 50;

struct DirectionSummary {
  double rot_noise = 0.0;
  double outlier_frac = 0.0;
  std::string method;
  int num_pairs = 0;
  int skipped_pairs = 0;
  double median = 0.0;
  double p90 = 0.0;
  // Counts over [0, pi/4] in kHistogramBins equal bins; larger errors are
  // not binned.
  std::vector<int> histogram;
};

struct DirectionsResult {
  std::vector<DirectionSummary> summaries;
  std::vector<PairRecord> pairs;
};

// For every (rot_noise, outlier_frac) and trial: one synthetic scene, every
// camera pair estimated by each method and signed by the cheirality vote.
DirectionsResult run_directions_compare(const ExperimentSpec& spec);

// "# key=value" lines echoing every parameter that affects the output.
void write_metadata(std::ostream& out, const ExperimentSpec& spec);

void write_cells_csv(std::ostream& out, const ExperimentSpec& spec, const GridResult& result);
void write_instances_csv(std::ostream& out, const ExperimentSpec& spec,
                         const GridResult& result);
void write_pairs_csv(std::ostream& out, const ExperimentSpec& spec,
                     const DirectionsResult& result);
void write_direction_summary_csv(std::ostream& out, const ExperimentSpec& spec,
                                 const DirectionsResult& result);

}  // namespace lud

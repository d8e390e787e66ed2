#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lud/formation.h"

namespace lud {

struct SolverConfig {
  // Lower bound c on every pair scale d_ij.
  double scale_floor = 1.0;
  // IRLS weights are (|r_ij|^2 + irls_delta)^(-1/2).
  double irls_delta = 1e-12;
  double irls_tol = 1e-8;
  int max_outer_iters = 200;
  double inner_tol = 1e-10;
  int inner_max_iters = 2000;
  std::uint64_t seed = 0;
  // Start the first inner solve from the LS baseline instead of a random
  // normal draw.
  bool init_from_ls = true;
  // Run the spectral rigidity test on the input and flag non-rigid graphs.
  bool check_rigidity = true;
};

struct IterationRecord {
  int iter = 0;
  // Sum |r_ij| for LUD, sum |r_ij|^2 for CLS and LS.
  double objective = 0.0;
  // Sum sqrt(|r_ij|^2 + delta); only meaningful for LUD.
  double regularized_objective = 0.0;
  double max_weight = 0.0;
  double min_pair_scale = 0.0;
};

struct SolverResult {
  LocationSet locations;
  // Indexed like formation.graph().edges().
  Eigen::VectorXd pair_scales;
  std::vector<IterationRecord> trace;
  bool converged = false;
  int iterations = 0;
  // Set when the input graph failed the rigidity test (the estimate is then
  // not unique).
  bool not_well_posed = false;
  std::vector<std::string> warnings;

  std::vector<double> cost_trace() const;
  std::vector<double> regularized_cost_trace() const;
};

struct InnerSolution {
  Eigen::MatrixXd locations;  // d x n, centered
  Eigen::VectorXd pair_scales;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  // Weighted objective after every sweep.
  std::vector<double> objective_trace;
};

// Weighted residual r_ij = t_i - t_j - d_ij gamma_ij on every edge (d x m).
Eigen::MatrixXd edge_residuals(const Formation& formation,
                               const Eigen::MatrixXd& locations,
                               const Eigen::VectorXd& pair_scales);

// minimize sum_ij w_ij |t_i - t_j - d_ij gamma_ij|^2
// subject to sum_i t_i = 0, d_ij >= c,
// by block coordinate descent: the scale block has the closed form
// d_ij = max(c, gamma_ij^T (t_i - t_j)); the location block is a weighted
// graph-Laplacian solve with the centering constraint folded in. The scale
// block is extrapolated with restarted momentum, and a slow solve is finished
// by an active-set iteration on {d_ij = c}. Returns the best iterate seen.
InnerSolution solve_inner_subproblem(
    const Formation& formation, const Eigen::VectorXd& weights,
    const SolverConfig& config,
    const std::optional<Eigen::MatrixXd>& warm_start = std::nullopt);

// Least unsquared deviations via IRLS.
SolverResult solve_lud(const Formation& formation, const SolverConfig& config = {});

// Constrained least squares: one inner solve with unit weights.
SolverResult solve_cls(const Formation& formation, const SolverConfig& config = {});

// Unit-norm minimizer of sum |(I - gamma gamma^T)(t_i - t_j)|^2 over centered t.
SolverResult solve_ls(const Formation& formation, const SolverConfig& config = {});

}  // namespace lud

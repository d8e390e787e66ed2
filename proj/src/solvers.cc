#include "lud/solvers.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "lud/error.h"
#include "lud/random.h"
#include "lud/rigidity.h"

namespace lud {
namespace {

void check_config(const SolverConfig& c) {
  if (!(c.scale_floor > 0.0) || !(c.irls_delta > 0.0) || !(c.irls_tol > 0.0) ||
      !(c.inner_tol > 0.0) || c.max_outer_iters < 1 || c.inner_max_iters < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "solver config needs c > 0, delta > 0, tolerances > 0 and "
                "positive iteration limits");
  }
}

void check_solvable(const Formation& formation) {
  if (formation.num_edges() == 0) {
    throw Error(ErrorCode::kUnsolvable, "formation has no edges");
  }
}

// Projected lengths gamma_ij^T (t_i - t_j).
Eigen::VectorXd projected_lengths(const Formation& formation,
                                  const Eigen::MatrixXd& t) {
  const auto& edges = formation.graph().edges();
  const Eigen::MatrixXd& g = formation.directions();
  Eigen::VectorXd len(formation.num_edges());
  for (int e = 0; e < formation.num_edges(); ++e) {
    len[e] = g.col(e).dot(t.col(edges[e].i) - t.col(edges[e].j));
  }
  return len;
}

Eigen::VectorXd floor_scales(const Eigen::VectorXd& len, double c) {
  return len.cwiseMax(c);
}

double weighted_objective(const Formation& formation, const Eigen::MatrixXd& t,
                          const Eigen::VectorXd& d, const Eigen::VectorXd& w) {
  const auto& edges = formation.graph().edges();
  const Eigen::MatrixXd& g = formation.directions();
  double f = 0.0;
  for (int e = 0; e < formation.num_edges(); ++e) {
    f += w[e] * (t.col(edges[e].i) - t.col(edges[e].j) - d[e] * g.col(e)).squaredNorm();
  }
  return f;
}

void flag_rigidity(const Formation& formation, const SolverConfig& config,
                   SolverResult* result) {
  if (!config.check_rigidity) return;
  if (formation.num_vertices() < 2) return;
  const RigidityReport report = spectral_rigidity_test(
      formation.graph(), formation.dimension(),
      derive_seed(config.seed, Stream::kRealization));
  if (!report.is_parallel_rigid) {
    result->not_well_posed = true;
    result->warnings.push_back(
        "measurement graph is not parallel rigid (rank " +
        std::to_string(report.measured_rank) + " < " +
        std::to_string(report.required_rank) + "); the estimate is not unique");
  }
}

Eigen::MatrixXd random_start(const Formation& formation, std::uint64_t seed) {
  Rng rng(derive_seed(seed, Stream::kInit));
  Eigen::MatrixXd t(formation.dimension(), formation.num_vertices());
  for (int i = 0; i < t.cols(); ++i) {
    t.col(i) = standard_normal_vector(rng, formation.dimension());
  }
  t.colwise() -= t.rowwise().mean();
  return t;
}

struct LsSolution {
  Eigen::MatrixXd locations;
  double eigenvalue = 0.0;
  double gap = 0.0;
  double scale = 1.0;
};

LsSolution ls_eigen_solve(const Formation& formation) {
  const int d = formation.dimension();
  const int n = formation.num_vertices();
  const auto& edges = formation.graph().edges();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d * n, d * n);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  for (int e = 0; e < formation.num_edges(); ++e) {
    const Eigen::VectorXd g = formation.direction(e);
    const Eigen::MatrixXd p = eye - g * g.transpose();
    const int i = edges[e].i, j = edges[e].j;
    m.block(d * i, d * i, d, d) += p;
    m.block(d * j, d * j, d, d) += p;
    m.block(d * i, d * j, d, d) -= p;
    m.block(d * j, d * i, d, d) -= p;
  }
  // Lift the d translation modes above the rest of the spectrum
  // (Gershgorin bound) so the smallest eigenvector is centered.
  const double lift = m.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m.block(d * i, d * j, d, d) += (lift / n) * eye;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kInnerSolver, "LS eigen-decomposition failed");
  }
  LsSolution sol;
  sol.scale = lift;
  sol.eigenvalue = eig.eigenvalues()[0];
  sol.gap = d * n > 1 ? eig.eigenvalues()[1] - eig.eigenvalues()[0] : 0.0;
  Eigen::VectorXd v = eig.eigenvectors().col(0);
  sol.locations = Eigen::Map<Eigen::MatrixXd>(v.data(), d, n);
  sol.locations.colwise() -= sol.locations.rowwise().mean();
  sol.locations /= sol.locations.norm();
  if (projected_lengths(formation, sol.locations).sum() < 0.0) sol.locations *= -1.0;
  return sol;
}

Eigen::MatrixXd initial_locations(const Formation& formation,
                                  const SolverConfig& config) {
  if (config.init_from_ls) {
    try {
      return ls_eigen_solve(formation).locations;
    } catch (const Error&) {
      // fall through to a random start
    }
  }
  return random_start(formation, config.seed);
}

// Sweeps of accelerated alternation before trying the active-set polish.
constexpr int kPolishAfterSweeps = 50;
constexpr int kMaxActiveSetSteps = 30;

struct PolishResult {
  Eigen::MatrixXd locations;
  Eigen::VectorXd pair_scales;
  double objective = 0.0;
  bool stable = false;
};

// Primal-dual active set on the inner QP. With the active set A = {d_ij = c}
// fixed, free edges only penalize the part of t_i - t_j orthogonal to
// gamma_ij and the problem is one symmetric positive definite solve in t.
// A stable active set satisfies the KKT conditions.
std::optional<PolishResult> active_set_polish(const Formation& formation,
                                              const Eigen::VectorXd& w,
                                              const Eigen::VectorXd& start_scales,
                                              double c, int max_steps) {
  const int n = formation.num_vertices();
  const int d = formation.dimension();
  const int m = formation.num_edges();
  const auto& edges = formation.graph().edges();
  const Eigen::MatrixXd& g = formation.directions();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);

  std::vector<char> active(m);
  for (int e = 0; e < m; ++e) active[e] = start_scales[e] <= c;

  std::optional<PolishResult> best;
  for (int step = 0; step < max_steps; ++step) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d * n, d * n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d * n);
    for (int e = 0; e < m; ++e) {
      const int i = edges[e].i, j = edges[e].j;
      const Eigen::MatrixXd blk =
          active[e] ? Eigen::MatrixXd(w[e] * eye)
                    : Eigen::MatrixXd(w[e] * (eye - g.col(e) * g.col(e).transpose()));
      h.block(d * i, d * i, d, d) += blk;
      h.block(d * j, d * j, d, d) += blk;
      h.block(d * i, d * j, d, d) -= blk;
      h.block(d * j, d * i, d, d) -= blk;
      if (active[e]) {
        b.segment(d * i, d) += (w[e] * c) * g.col(e);
        b.segment(d * j, d) -= (w[e] * c) * g.col(e);
      }
    }
    const double lift = h.diagonal().mean() / n;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) h.block(d * i, d * j, d, d) += lift * eye;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() != Eigen::Success) return best;
    const Eigen::VectorXd x = llt.solve(b);
    if (!x.allFinite()) return best;
    Eigen::MatrixXd t = Eigen::Map<const Eigen::MatrixXd>(x.data(), d, n);
    t.colwise() -= t.rowwise().mean();

    const Eigen::VectorXd len = projected_lengths(formation, t);
    const Eigen::VectorXd scales = floor_scales(len, c);
    const double f = weighted_objective(formation, t, scales, w);
    if (!best || f < best->objective) best = PolishResult{t, scales, f, false};

    bool changed = false;
    for (int e = 0; e < m; ++e) {
      const char now = len[e] <= c;
      changed |= now != active[e];
      active[e] = now;
    }
    if (!changed) {
      best->stable = f <= best->objective;
      return best;
    }
  }
  return best;
}

}  // namespace

std::vector<double> SolverResult::cost_trace() const {
  std::vector<double> out;
  for (const auto& r : trace) out.push_back(r.objective);
  return out;
}

std::vector<double> SolverResult::regularized_cost_trace() const {
  std::vector<double> out;
  for (const auto& r : trace) out.push_back(r.regularized_objective);
  return out;
}

Eigen::MatrixXd edge_residuals(const Formation& formation,
                               const Eigen::MatrixXd& locations,
                               const Eigen::VectorXd& pair_scales) {
  const auto& edges = formation.graph().edges();
  const Eigen::MatrixXd& g = formation.directions();
  Eigen::MatrixXd r(formation.dimension(), formation.num_edges());
  for (int e = 0; e < formation.num_edges(); ++e) {
    r.col(e) = locations.col(edges[e].i) - locations.col(edges[e].j) -
               pair_scales[e] * g.col(e);
  }
  return r;
}

InnerSolution solve_inner_subproblem(const Formation& formation,
                                     const Eigen::VectorXd& weights,
                                     const SolverConfig& config,
                                     const std::optional<Eigen::MatrixXd>& warm_start) {
  check_config(config);
  check_solvable(formation);
  const int n = formation.num_vertices();
  const int d = formation.dimension();
  const int m = formation.num_edges();
  if (weights.size() != m || !(weights.minCoeff() > 0.0) || !weights.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "need one positive weight per edge");
  }
  if (!formation.graph().is_connected()) {
    throw Error(ErrorCode::kInnerSolver,
                "weighted Laplacian is singular: measurement graph is disconnected");
  }
  const auto& edges = formation.graph().edges();
  const Eigen::MatrixXd& g = formation.directions();
  const double c = config.scale_floor;

  // L_w + (mu/n) 1 1^T is positive definite on a connected graph, and for a
  // right-hand side summing to zero its solution is the centered solution of
  // L_w t = b.
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < m; ++e) {
    const int i = edges[e].i, j = edges[e].j;
    lap(i, i) += weights[e];
    lap(j, j) += weights[e];
    lap(i, j) -= weights[e];
    lap(j, i) -= weights[e];
  }
  const double mu = lap.diagonal().mean();
  lap.array() += mu / n;
  Eigen::LLT<Eigen::MatrixXd> llt(lap);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kInnerSolver, "weighted Laplacian factorization failed");
  }

  InnerSolution sol;
  Eigen::MatrixXd t;
  if (warm_start) {
    if (warm_start->rows() != d || warm_start->cols() != n) {
      throw Error(ErrorCode::kInvalidArgument, "warm start has the wrong shape");
    }
    t = *warm_start;
    t.colwise() -= t.rowwise().mean();
  } else {
    t = Eigen::MatrixXd::Zero(d, n);
  }
  // Alternating minimization over (t, d) is projected gradient descent with
  // step 1/2 on the reduced problem q(d) = min_t F(t, d), in the metric
  // weighted by w. Nesterov momentum on the scale block, restarted whenever
  // the objective goes up, removes the slow drift along the scale mode.
  Eigen::VectorXd scales = floor_scales(projected_lengths(formation, t), c);
  double f_prev = weighted_objective(formation, t, scales, weights);
  const double zero_floor = 1e-24 * weights.sum() * c * c;
  Eigen::MatrixXd best_t = t;
  Eigen::VectorXd best_scales = scales;
  double best_f = f_prev;

  Eigen::VectorXd extrapolated = scales;
  double theta = 1.0;
  Eigen::MatrixXd rhs(d, n);
  Eigen::VectorXd next(m);
  for (int it = 1; it <= config.inner_max_iters; ++it) {
    rhs.setZero();
    for (int e = 0; e < m; ++e) {
      const double s = weights[e] * extrapolated[e];
      const double* ge = g.col(e).data();
      double* ri = rhs.col(edges[e].i).data();
      double* rj = rhs.col(edges[e].j).data();
      for (int k = 0; k < d; ++k) {
        ri[k] += s * ge[k];
        rj[k] -= s * ge[k];
      }
    }
    t = llt.solve(rhs.transpose()).transpose();
    if (!t.allFinite()) {
      throw Error(ErrorCode::kInnerSolver,
                  "non-finite location update at sweep " + std::to_string(it));
    }
    // Scale step and objective in one pass over the edges.
    double f = 0.0;
    for (int e = 0; e < m; ++e) {
      const double* ge = g.col(e).data();
      const double* ti = t.col(edges[e].i).data();
      const double* tj = t.col(edges[e].j).data();
      double len = 0.0;
      for (int k = 0; k < d; ++k) len += ge[k] * (ti[k] - tj[k]);
      next[e] = std::max(c, len);
      double r2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double r = ti[k] - tj[k] - next[e] * ge[k];
        r2 += r * r;
      }
      f += weights[e] * r2;
    }
    sol.objective_trace.push_back(f);
    sol.iterations = it;
    if (f < best_f) {
      best_f = f;
      best_t = t;
      best_scales = next;
    }
    if (f > f_prev) {
      theta = 1.0;
      extrapolated = next;
    } else {
      const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      extrapolated = next + ((theta - 1.0) / theta_next) * (next - scales);
      theta = theta_next;
    }
    const bool flat = std::abs(f_prev - f) <= config.inner_tol * f_prev &&
                      (next - scales).norm() <= std::sqrt(config.inner_tol) * next.norm();
    scales = next;
    f_prev = f;
    if (best_f <= zero_floor || flat) {
      sol.converged = true;
      break;
    }
    if (it == kPolishAfterSweeps) {
      const auto polish = active_set_polish(formation, weights, best_scales, c,
                                            kMaxActiveSetSteps);
      if (polish && polish->objective <= best_f) {
        best_f = polish->objective;
        best_t = polish->locations;
        best_scales = polish->pair_scales;
        if (polish->stable) {
          sol.objective_trace.push_back(best_f);
          sol.converged = true;
          break;
        }
      }
    }
  }
  t = std::move(best_t);
  scales = std::move(best_scales);
  f_prev = best_f;
  t.colwise() -= t.rowwise().mean();
  // The objective is homogeneous of degree 2, so shrinking toward the floor
  // never costs anything. This pins down the scale of zero-cost solutions.
  const double shrink = c / scales.minCoeff();
  if (shrink < 1.0) {
    t *= shrink;
    scales = (scales * shrink).cwiseMax(c);
    f_prev *= shrink * shrink;
  }
  sol.locations = std::move(t);
  sol.pair_scales = std::move(scales);
  sol.objective = f_prev;
  return sol;
}

SolverResult solve_lud(const Formation& formation, const SolverConfig& config) {
  check_config(config);
  check_solvable(formation);
  SolverResult result;
  flag_rigidity(formation, config, &result);

  const int m = formation.num_edges();
  const double delta = config.irls_delta;
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(m);
  Eigen::MatrixXd t = initial_locations(formation, config);
  Eigen::VectorXd scales;
  double prev_reg = std::numeric_limits<double>::infinity();

  for (int r = 0; r < config.max_outer_iters; ++r) {
    InnerSolution inner;
    try {
      inner = solve_inner_subproblem(formation, weights, config, t);
    } catch (const Error& err) {
      throw Error(ErrorCode::kInnerSolver,
                  "outer iteration " + std::to_string(r) + ": " + err.what());
    }
    const Eigen::VectorXd res2 =
        edge_residuals(formation, inner.locations, inner.pair_scales)
            .colwise()
            .squaredNorm()
            .transpose();
    const double reg = (res2.array() + delta).sqrt().sum();
    const double obj = res2.array().sqrt().sum();

    const double step = (inner.locations - t).norm();
    const double size = std::max(inner.locations.norm(), 1e-300);
    t = std::move(inner.locations);
    scales = std::move(inner.pair_scales);
    weights = (res2.array() + delta).rsqrt().matrix();
    result.trace.push_back({r, obj, reg, weights.maxCoeff(), scales.minCoeff()});
    result.iterations = r + 1;

    if (r > 0 && std::abs(prev_reg - reg) <= config.irls_tol * prev_reg &&
        step <= config.irls_tol * size) {
      result.converged = true;
      break;
    }
    prev_reg = reg;
  }
  result.locations = LocationSet(std::move(t));
  result.pair_scales = std::move(scales);
  return result;
}

SolverResult solve_cls(const Formation& formation, const SolverConfig& config) {
  check_config(config);
  check_solvable(formation);
  SolverResult result;
  flag_rigidity(formation, config, &result);

  InnerSolution inner = solve_inner_subproblem(
      formation, Eigen::VectorXd::Ones(formation.num_edges()), config,
      initial_locations(formation, config));
  for (std::size_t k = 0; k < inner.objective_trace.size(); ++k) {
    result.trace.push_back({static_cast<int>(k), inner.objective_trace[k], 0.0, 1.0,
                            0.0});
  }
  if (!result.trace.empty()) result.trace.back().min_pair_scale = inner.pair_scales.minCoeff();
  result.converged = inner.converged;
  result.iterations = inner.iterations;
  result.locations = LocationSet(std::move(inner.locations));
  result.pair_scales = std::move(inner.pair_scales);
  return result;
}

SolverResult solve_ls(const Formation& formation, const SolverConfig& config) {
  check_config(config);
  check_solvable(formation);
  if (!formation.graph().is_connected()) {
    throw Error(ErrorCode::kInvalidArgument, "LS baseline needs a connected graph");
  }
  SolverResult result;
  flag_rigidity(formation, config, &result);

  const LsSolution sol = ls_eigen_solve(formation);
  result.converged = sol.gap > 1e-12 * sol.scale;
  if (!result.converged) {
    result.not_well_posed = true;
    result.warnings.push_back(
        "LS system has more than one zero eigenvalue beyond translations; "
        "returning the smallest eigenvector");
  }
  result.pair_scales =
      floor_scales(projected_lengths(formation, sol.locations), config.scale_floor);
  result.trace.push_back({0, std::max(sol.eigenvalue, 0.0), 0.0, 1.0,
                          result.pair_scales.minCoeff()});
  result.iterations = 1;
  result.locations = LocationSet(sol.locations);
  return result;
}

}  // namespace lud

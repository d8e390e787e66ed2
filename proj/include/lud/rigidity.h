#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "lud/formation.h"

namespace lud {

struct RigidityReport {
  bool is_parallel_rigid = false;
  int measured_rank = 0;
  // d * n - (d + 1)
  int required_rank = 0;
  // d * n - measured_rank - (d + 1); zero iff rigid.
  int nullspace_dim_beyond_trivial = 0;
  int num_connected_components = 0;
  // Maximal parallel rigid components, each sorted ascending, listed by
  // decreasing size then by smallest vertex. Empty unless produced by
  // extract_maximal_components.
  std::vector<std::vector<int>> components;
};

struct RigidityOptions {
  // Singular values below rank_tol * sigma_max count as zero.
  double rank_tol = 1e-9;
  // Relative agreement required between per-edge scale ratios.
  double ratio_tol = 1e-6;
  // Number of random nullspace samples used to group edges.
  int num_nullspace_samples = 3;
};

inline constexpr int kOracleVertexLimit = 8;

// Combinatorial parallel rigidity test: true iff some D within (d-1) copies
// of each edge has |D| = d|V| - (d+1) and |D'| <= d|V(D')| - (d+1) for every
// nonempty D' in D. Exponential in |V|; refuses graphs above vertex_limit.
bool theorem1_oracle(const Graph& graph, int d,
                     int vertex_limit = kOracleVertexLimit);

// The (d-1)m x dn direction-constraint matrix of a realization: the row
// block of edge (i,j) holds an orthonormal basis of gamma_ij^perp (transposed)
// in column block i and its negation in column block j.
Eigen::MatrixXd direction_constraint_matrix(const Graph& graph,
                                            const Eigen::MatrixXd& realization);

// Numerical rank of the constraint matrix for a random generic realization.
// Deterministic per seed. Disconnected graphs are ranked per connected
// component and reported non-rigid.
RigidityReport spectral_rigidity_test(const Graph& graph, int d,
                                      std::uint64_t seed,
                                      double rank_tol = 1e-9);

// Spectral test plus maximal parallel rigid components. Edges are grouped by
// their scale ratio under random infinitesimal parallel redrawings; every
// group is re-verified with spectral_rigidity_test before it is reported.
RigidityReport extract_maximal_components(const Graph& graph, int d,
                                          std::uint64_t seed,
                                          const RigidityOptions& options = {});

struct Restriction {
  Formation formation;
  // vertex_map[k] is the original index of restricted vertex k.
  std::vector<int> vertex_map;
};

// Induced sub-formation on the largest reported component (ties go to the
// component with the smallest lowest vertex).
Restriction largest_component_restriction(const Formation& formation,
                                          const RigidityReport& report);

}  // namespace lud

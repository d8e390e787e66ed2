#include "lud/rigidity.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "lud/error.h"
#include "lud/random.h"

namespace lud {
namespace {

// Columns 1..d-1 of the Householder reflector that maps g onto a multiple of
// e_1 form an orthonormal basis of g^perp.
Eigen::MatrixXd orthogonal_complement(const Eigen::VectorXd& g) {
  const int d = static_cast<int>(g.size());
  Eigen::VectorXd v = g;
  v[0] += (g[0] >= 0.0 ? 1.0 : -1.0) * g.norm();
  const double vv = v.squaredNorm();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(d, d) - (2.0 / vv) * v * v.transpose();
  return h.rightCols(d - 1);
}

struct Spectrum {
  Eigen::VectorXd singular_values;  // length = number of columns, descending
  Eigen::MatrixXd v;                // right singular vectors, if requested
};

// Singular values of a tall or wide matrix, padded with zeros up to the
// column count. Tall inputs are first reduced to their R factor, which has
// the same singular values and right singular vectors.
Spectrum column_spectrum(const Eigen::MatrixXd& a, bool want_v) {
  const Eigen::Index cols = a.cols();
  Spectrum s;
  s.singular_values = Eigen::VectorXd::Zero(cols);
  if (cols == 0) return s;
  const unsigned options = want_v ? static_cast<unsigned>(Eigen::ComputeFullV) : 0u;
  if (a.rows() > cols) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd r =
        qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(r, options);
    s.singular_values = svd.singularValues();
    if (want_v) s.v = svd.matrixV();
  } else if (a.rows() > 0) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, options);
    s.singular_values.head(svd.singularValues().size()) = svd.singularValues();
    if (want_v) s.v = svd.matrixV();
  } else if (want_v) {
    s.v = Eigen::MatrixXd::Identity(cols, cols);
  }
  return s;
}

int numerical_rank(const Eigen::VectorXd& sv, double rank_tol) {
  if (sv.size() == 0) return 0;
  const double cutoff = rank_tol * sv.maxCoeff();
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) rank += sv[k] > cutoff ? 1 : 0;
  return rank;
}

Eigen::MatrixXd generic_realization(int n, int d, std::uint64_t seed) {
  Rng rng(derive_seed(seed, Stream::kRealization));
  Eigen::MatrixXd t(d, n);
  for (int i = 0; i < n; ++i) t.col(i) = standard_normal_vector(rng, d);
  return t;
}

void check_dimension(int d) {
  if (d < 2) throw Error(ErrorCode::kInvalidArgument, "dimension must be >= 2");
}

std::vector<int> vertices_of(const std::vector<int>& group_edges,
                             const Graph& graph) {
  std::vector<int> vs;
  for (int e : group_edges) {
    vs.push_back(graph.edge(e).i);
    vs.push_back(graph.edge(e).j);
  }
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

bool induced_is_rigid(const Graph& graph, const std::vector<int>& vertices,
                      int d, std::uint64_t seed, double rank_tol) {
  if (vertices.size() < 2) return false;
  return spectral_rigidity_test(graph.induced_subgraph(vertices), d, seed, rank_tol)
      .is_parallel_rigid;
}

bool shares_vertex(const std::vector<int>& a, const std::vector<int>& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia == *ib) return true;
    if (*ia < *ib) ++ia; else ++ib;
  }
  return false;
}

}  // namespace

bool theorem1_oracle(const Graph& graph, int d, int vertex_limit) {
  check_dimension(d);
  const int n = graph.num_vertices();
  if (n < 2) throw Error(ErrorCode::kTrivialInput, "need at least 2 vertices");
  if (n > vertex_limit) {
    throw Error(ErrorCode::kOracleSize,
                std::to_string(n) + " vertices exceeds the exhaustive oracle limit of " +
                    std::to_string(vertex_limit) +
                    "; use spectral_rigidity_test instead");
  }
  // Multisets D satisfying the subset counts are the independent sets of the
  // (d, d+1)-sparsity matroid on (d-1)E. It suffices to check vertex subsets
  // S (taking every copy spanned by S is the worst D' on S), and greedy
  // insertion reaches the maximum |D| because all bases of a matroid have
  // equal size.
  const int target = d * n - (d + 1);
  const std::uint32_t full = (1u << n) - 1u;
  std::vector<int> count(full + 1u, 0);
  int accepted = 0;
  for (const Edge& e : graph.edges()) {
    const std::uint32_t pair = (1u << e.i) | (1u << e.j);
    for (int copy = 0; copy < d - 1; ++copy) {
      bool independent = true;
      for (std::uint32_t s = full; independent; s = (s - 1) & full) {
        if ((s & pair) == pair) {
          const int bound = d * std::popcount(s) - (d + 1);
          independent = count[s] + 1 <= bound;
        }
        if (s == 0) break;
      }
      if (!independent) break;
      for (std::uint32_t s = full;; s = (s - 1) & full) {
        if ((s & pair) == pair) ++count[s];
        if (s == 0) break;
      }
      ++accepted;
    }
  }
  return accepted == target;
}

Eigen::MatrixXd direction_constraint_matrix(const Graph& graph,
                                            const Eigen::MatrixXd& realization) {
  const int d = static_cast<int>(realization.rows());
  const int n = graph.num_vertices();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero((d - 1) * graph.num_edges(), d * n);
  for (int e = 0; e < graph.num_edges(); ++e) {
    const Edge& ed = graph.edge(e);
    Eigen::VectorXd g = realization.col(ed.i) - realization.col(ed.j);
    const double norm = g.norm();
    if (norm == 0.0) {
      throw Error(ErrorCode::kDegeneratePair,
                  "coincident realization points on edge (" + std::to_string(ed.i) +
                      "," + std::to_string(ed.j) + ")");
    }
    const Eigen::MatrixXd u = orthogonal_complement(g / norm);
    a.block((d - 1) * e, d * ed.i, d - 1, d) = u.transpose();
    a.block((d - 1) * e, d * ed.j, d - 1, d) = -u.transpose();
  }
  return a;
}

RigidityReport spectral_rigidity_test(const Graph& graph, int d,
                                      std::uint64_t seed, double rank_tol) {
  check_dimension(d);
  const int n = graph.num_vertices();
  if (n < 2) throw Error(ErrorCode::kTrivialInput, "need at least 2 vertices");

  RigidityReport report;
  report.required_rank = d * n - (d + 1);
  const std::vector<int> label = graph.connected_component_labels(
      &report.num_connected_components);

  const Eigen::MatrixXd t = generic_realization(n, d, seed);
  if (report.num_connected_components == 1) {
    report.measured_rank = numerical_rank(
        column_spectrum(direction_constraint_matrix(graph, t), false).singular_values,
        rank_tol);
  } else {
    for (int c = 0; c < report.num_connected_components; ++c) {
      std::vector<int> members;
      for (int v = 0; v < n; ++v) {
        if (label[v] == c) members.push_back(v);
      }
      if (members.size() < 2) continue;
      Eigen::MatrixXd sub_t(d, members.size());
      for (std::size_t k = 0; k < members.size(); ++k) sub_t.col(k) = t.col(members[k]);
      const Graph sub = graph.induced_subgraph(members);
      report.measured_rank += numerical_rank(
          column_spectrum(direction_constraint_matrix(sub, sub_t), false).singular_values,
          rank_tol);
    }
  }
  report.nullspace_dim_beyond_trivial = d * n - report.measured_rank - (d + 1);
  report.is_parallel_rigid = report.num_connected_components == 1 &&
                             report.measured_rank == report.required_rank;
  return report;
}

RigidityReport extract_maximal_components(const Graph& graph, int d,
                                          std::uint64_t seed,
                                          const RigidityOptions& options) {
  check_dimension(d);
  if (graph.num_edges() == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "component extraction needs at least one edge");
  }
  const int n = graph.num_vertices();
  const int m = graph.num_edges();
  RigidityReport report = spectral_rigidity_test(graph, d, seed, options.rank_tol);
  if (report.is_parallel_rigid) {
    std::vector<int> all(n);
    for (int v = 0; v < n; ++v) all[v] = v;
    report.components = {all};
    return report;
  }

  // Nullspace of the constraint matrix = parallel redrawings x of the
  // realization t. On every edge x_i - x_j = s_ij (t_i - t_j); s is constant
  // across a rigid component and generically differs between components.
  const Eigen::MatrixXd t = generic_realization(n, d, seed);
  const Spectrum spec = column_spectrum(direction_constraint_matrix(graph, t), true);
  const double cutoff = options.rank_tol * spec.singular_values.maxCoeff();
  std::vector<int> null_cols;
  for (int k = 0; k < d * n; ++k) {
    if (!(spec.singular_values[k] > cutoff)) null_cols.push_back(k);
  }
  Eigen::MatrixXd null_basis(d * n, null_cols.size());
  for (std::size_t k = 0; k < null_cols.size(); ++k) {
    null_basis.col(k) = spec.v.col(null_cols[k]);
  }

  const int samples = std::max(1, options.num_nullspace_samples);
  Rng rng(derive_seed(seed, Stream::kNullspace));
  Eigen::MatrixXd ratios(samples, m);
  for (int k = 0; k < samples; ++k) {
    const Eigen::VectorXd x =
        null_basis * standard_normal_vector(rng, static_cast<int>(null_cols.size()));
    for (int e = 0; e < m; ++e) {
      const Edge& ed = graph.edge(e);
      const Eigen::VectorXd dt = t.col(ed.i) - t.col(ed.j);
      const Eigen::VectorXd dx =
          x.segment(d * ed.i, d) - x.segment(d * ed.j, d);
      ratios(k, e) = dx.dot(dt) / dt.squaredNorm();
    }
    const double scale = ratios.row(k).cwiseAbs().maxCoeff();
    if (scale > 0.0) ratios.row(k) /= scale;
  }

  std::vector<std::vector<int>> groups;
  for (int e = 0; e < m; ++e) {
    bool placed = false;
    for (auto& g : groups) {
      if ((ratios.col(g.front()) - ratios.col(e)).cwiseAbs().maxCoeff() <=
          options.ratio_tol) {
        g.push_back(e);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({e});
  }

  std::uint64_t check_index = 0;
  auto next_seed = [&] { return derive_seed(seed, {0xc0ffeeULL, check_index++}); };

  // Merge vertex-sharing groups only when the union is itself rigid.
  std::vector<std::vector<int>> group_vertices;
  for (const auto& g : groups) group_vertices.push_back(vertices_of(g, graph));
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t a = 0; a < groups.size() && !merged; ++a) {
      for (std::size_t b = a + 1; b < groups.size() && !merged; ++b) {
        if (!shares_vertex(group_vertices[a], group_vertices[b])) continue;
        std::vector<int> joined = groups[a];
        joined.insert(joined.end(), groups[b].begin(), groups[b].end());
        std::vector<int> joined_vertices = vertices_of(joined, graph);
        if (induced_is_rigid(graph, joined_vertices, d, next_seed(), options.rank_tol)) {
          groups[a] = std::move(joined);
          group_vertices[a] = std::move(joined_vertices);
          groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(b));
          group_vertices.erase(group_vertices.begin() + static_cast<std::ptrdiff_t>(b));
          merged = true;
        }
      }
    }
  }

  // Re-verify; a group that fails falls back to its single edges, which are
  // always rigid.
  std::vector<std::vector<int>> components;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (group_vertices[g].size() == 2 ||
        induced_is_rigid(graph, group_vertices[g], d, next_seed(), options.rank_tol)) {
      components.push_back(group_vertices[g]);
    } else {
      for (int e : groups[g]) components.push_back({graph.edge(e).i, graph.edge(e).j});
    }
  }

  std::sort(components.begin(), components.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              if (a.size() != b.size()) return a.size() > b.size();
              return a < b;
            });
  components.erase(std::unique(components.begin(), components.end()),
                   components.end());
  // Drop anything contained in a larger component.
  std::vector<std::vector<int>> maximal;
  for (const auto& c : components) {
    bool contained = false;
    for (const auto& big : maximal) {
      contained = std::includes(big.begin(), big.end(), c.begin(), c.end());
      if (contained) break;
    }
    if (!contained) maximal.push_back(c);
  }
  report.components = std::move(maximal);
  return report;
}

Restriction largest_component_restriction(const Formation& formation,
                                          const RigidityReport& report) {
  const int n = formation.num_vertices();
  std::vector<int> chosen;
  if (report.components.empty()) {
    if (!report.is_parallel_rigid) {
      throw Error(ErrorCode::kNoWellPosedSubproblem,
                  "report lists no parallel rigid component");
    }
    chosen.resize(n);
    for (int v = 0; v < n; ++v) chosen[v] = v;
  } else {
    for (const auto& c : report.components) {
      if (c.size() < 2) continue;
      if (chosen.empty() || c.size() > chosen.size() ||
          (c.size() == chosen.size() && c.front() < chosen.front())) {
        chosen = c;
      }
    }
    if (chosen.empty()) {
      throw Error(ErrorCode::kNoWellPosedSubproblem,
                  "no parallel rigid component with at least 2 vertices");
    }
  }
  for (int v : chosen) {
    if (v < 0 || v >= n) {
      throw Error(ErrorCode::kInvalidArgument, "report does not match formation");
    }
  }

  // chosen is ascending, so local edge orientation matches the original.
  const Graph sub = formation.graph().induced_subgraph(chosen);
  Eigen::MatrixXd directions(formation.dimension(), sub.num_edges());
  for (int e = 0; e < sub.num_edges(); ++e) {
    const Edge& ed = sub.edge(e);
    directions.col(e) =
        formation.direction(formation.graph().find_edge(chosen[ed.i], chosen[ed.j]));
  }
  return {Formation(sub, std::move(directions)), chosen};
}

}  // namespace lud

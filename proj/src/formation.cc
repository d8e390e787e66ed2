#include "lud/formation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lud/error.h"
#include "lud/random.h"

namespace lud {

LocationSet::LocationSet(Eigen::MatrixXd points) : points_(std::move(points)) {
  if (points_.rows() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "location dimension must be >= 2");
  }
  if (points_.cols() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least 2 locations");
  }
  if (!points_.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite location coordinate");
  }
}

Graph::Graph(int num_vertices, std::vector<Edge> edges)
    : num_vertices_(num_vertices), edges_(std::move(edges)) {
  if (num_vertices_ < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative vertex count");
  }
  for (Edge& e : edges_) {
    if (e.i == e.j) {
      throw Error(ErrorCode::kInvalidArgument,
                  "self-loop at vertex " + std::to_string(e.i));
    }
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.i < 0 || e.j >= num_vertices_) {
      throw Error(ErrorCode::kInvalidArgument,
                  "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                      ") out of range");
    }
  }
  std::sort(edges_.begin(), edges_.end());
  auto dup = std::adjacent_find(edges_.begin(), edges_.end());
  if (dup != edges_.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "duplicate edge (" + std::to_string(dup->i) + "," +
                    std::to_string(dup->j) + ")");
  }
}

int Graph::find_edge(int a, int b) const {
  Edge key{std::min(a, b), std::max(a, b)};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  if (it == edges_.end() || *it != key) return -1;
  return static_cast<int>(it - edges_.begin());
}

std::vector<int> Graph::connected_component_labels(int* count) const {
  std::vector<int> parent(num_vertices_);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const Edge& e : edges_) {
    int a = find(e.i), b = find(e.j);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<int> label(num_vertices_, -1);
  int next = 0;
  for (int v = 0; v < num_vertices_; ++v) {
    int root = find(v);
    if (label[root] < 0) label[root] = next++;
    label[v] = label[root];
  }
  if (count) *count = next;
  return label;
}

bool Graph::is_connected() const {
  int count = 0;
  connected_component_labels(&count);
  return count <= 1;
}

Graph Graph::induced_subgraph(const std::vector<int>& vertices) const {
  std::vector<int> local(num_vertices_, -1);
  for (int k = 0; k < static_cast<int>(vertices.size()); ++k) {
    local[vertices[k]] = k;
  }
  std::vector<Edge> sub;
  for (const Edge& e : edges_) {
    if (local[e.i] >= 0 && local[e.j] >= 0) sub.push_back({local[e.i], local[e.j]});
  }
  return Graph(static_cast<int>(vertices.size()), std::move(sub));
}

Formation::Formation(Graph graph, Eigen::MatrixXd directions)
    : graph_(std::move(graph)), directions_(std::move(directions)) {
  if (directions_.rows() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "direction dimension must be >= 2");
  }
  if (directions_.cols() != graph_.num_edges()) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected one direction per edge, got " +
                    std::to_string(directions_.cols()) + " for " +
                    std::to_string(graph_.num_edges()) + " edges");
  }
  for (int e = 0; e < graph_.num_edges(); ++e) {
    if (std::abs(directions_.col(e).norm() - 1.0) > kUnitNormTolerance) {
      const Edge& ed = graph_.edge(e);
      throw Error(ErrorCode::kInvalidArgument,
                  "direction on edge (" + std::to_string(ed.i) + "," +
                      std::to_string(ed.j) + ") is not unit norm");
    }
  }
}

Eigen::VectorXd Formation::direction(int a, int b) const {
  const int e = graph_.find_edge(a, b);
  if (e < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "no edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
  }
  return a < b ? Eigen::VectorXd(directions_.col(e))
               : Eigen::VectorXd(-directions_.col(e));
}

Graph generate_erdos_renyi(int n, double q, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "need n >= 2");
  if (!(q > 0.0 && q <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "edge probability must be in (0,1]");
  }
  Rng rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (uniform(rng) < q) edges.push_back({i, j});
    }
  }
  return Graph(n, std::move(edges));
}

LocationSet random_locations(int n, int d, std::uint64_t seed) {
  if (n < 2 || d < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need n >= 2 and d >= 2");
  }
  Rng rng(seed);
  for (;;) {
    Eigen::MatrixXd points(d, n);
    for (int i = 0; i < n; ++i) points.col(i) = standard_normal_vector(rng, d);
    // Exact coincidence only; near-coincident draws are kept.
    bool distinct = true;
    for (int i = 0; i < n && distinct; ++i) {
      for (int j = i + 1; j < n && distinct; ++j) {
        distinct = points.col(i) != points.col(j);
      }
    }
    if (distinct) return LocationSet(std::move(points));
  }
}

Formation exact_directions(const LocationSet& locations, const Graph& graph) {
  if (graph.num_vertices() != locations.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "graph and location set disagree on vertex count");
  }
  const Eigen::MatrixXd& t = locations.points();
  Eigen::MatrixXd directions(locations.dimension(), graph.num_edges());
  for (int e = 0; e < graph.num_edges(); ++e) {
    const Edge& ed = graph.edge(e);
    Eigen::VectorXd diff = t.col(ed.i) - t.col(ed.j);
    const double norm = diff.norm();
    if (norm == 0.0) {
      throw Error(ErrorCode::kDegeneratePair,
                  "coincident endpoints on edge (" + std::to_string(ed.i) + "," +
                      std::to_string(ed.j) + ")");
    }
    directions.col(e) = diff / norm;
  }
  return Formation(graph, std::move(directions));
}

Formation corrupt_directions(const Formation& formation,
                             const NoiseModelParams& params) {
  const double p = params.outlier_probability;
  const double sigma = params.gaussian_sigma;
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "outlier probability must be in [0,1]");
  }
  if (!(sigma >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma must be >= 0");
  }
  const int d = formation.dimension();
  Rng rng(params.rng_seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Eigen::MatrixXd out = formation.directions();
  for (int e = 0; e < formation.num_edges(); ++e) {
    const bool outlier = uniform(rng) < p;
    Eigen::VectorXd g = standard_normal_vector(rng, d);
    if (outlier) {
      while (g.norm() == 0.0) g = standard_normal_vector(rng, d);
      out.col(e) = g / g.norm();
    } else if (sigma > 0.0) {
      Eigen::VectorXd perturbed = out.col(e) + sigma * g;
      while (perturbed.norm() == 0.0) {
        perturbed = out.col(e) + sigma * standard_normal_vector(rng, d);
      }
      out.col(e) = perturbed / perturbed.norm();
    }
    // sigma == 0 inliers keep their bits.
  }
  return Formation(formation.graph(), std::move(out));
}

}  // namespace lud

#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace lud {

// n points in R^d, stored column-wise (d x n).
class LocationSet {
 public:
  LocationSet() = default;
  explicit LocationSet(Eigen::MatrixXd points);

  int dimension() const { return static_cast<int>(points_.rows()); }
  int size() const { return static_cast<int>(points_.cols()); }

  const Eigen::MatrixXd& points() const { return points_; }
  Eigen::VectorXd point(int i) const { return points_.col(i); }
  Eigen::VectorXd centroid() const { return points_.rowwise().mean(); }

 private:
  Eigen::MatrixXd points_;
};

// Undirected edge with canonical orientation i < j.
struct Edge {
  int i = 0;
  int j = 0;

  auto operator<=>(const Edge&) const = default;
};

// Simple undirected graph on vertices 0..n-1. Edges are kept sorted and
// unique; the constructor canonicalizes (j, i) to (i, j).
class Graph {
 public:
  Graph() = default;
  Graph(int num_vertices, std::vector<Edge> edges);

  int num_vertices() const { return num_vertices_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }

  // Index of edge {a, b} in edges(), or -1.
  int find_edge(int a, int b) const;

  // Component label per vertex, labels dense in [0, count).
  std::vector<int> connected_component_labels(int* count = nullptr) const;
  bool is_connected() const;

  // Subgraph induced on `vertices` (any order, no duplicates). Vertex k of
  // the result is vertices[k].
  Graph induced_subgraph(const std::vector<int>& vertices) const;

 private:
  int num_vertices_ = 0;
  std::vector<Edge> edges_;
};

// A measurement graph with one unit direction per edge. Column e of
// directions() is gamma_ij for edge(e) = (i, j), i < j; gamma_ji = -gamma_ij.
class Formation {
 public:
  Formation() = default;
  Formation(Graph graph, Eigen::MatrixXd directions);

  int dimension() const { return static_cast<int>(directions_.rows()); }
  int num_vertices() const { return graph_.num_vertices(); }
  int num_edges() const { return graph_.num_edges(); }
  const Graph& graph() const { return graph_; }
  const Eigen::MatrixXd& directions() const { return directions_; }

  Eigen::VectorXd direction(int e) const { return directions_.col(e); }
  // gamma_ab for an arbitrary ordered pair; negated when a > b.
  Eigen::VectorXd direction(int a, int b) const;

 private:
  Graph graph_;
  Eigen::MatrixXd directions_;
};

struct NoiseModelParams {
  double outlier_probability = 0.0;
  double gaussian_sigma = 0.0;
  std::uint64_t rng_seed = 0;
};

inline constexpr double kUnitNormTolerance = 1e-12;

Graph generate_erdos_renyi(int n, double q, std::uint64_t seed);

LocationSet random_locations(int n, int d, std::uint64_t seed);

// gamma_ij = (t_i - t_j) / |t_i - t_j| on every edge.
Formation exact_directions(const LocationSet& locations, const Graph& graph);

// Per edge, independently: with probability p a uniform unit vector, otherwise
// the current direction plus sigma times a standard normal vector; normalized.
// Every edge consumes the same number of draws whichever branch it takes.
Formation corrupt_directions(const Formation& formation,
                             const NoiseModelParams& params);

}  // namespace lud

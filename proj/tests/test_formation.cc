#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lud/error.h"
#include "lud/eval.h"
#include "lud/formation.h"
#include "lud/random.h"
#include "oracles.h"

using namespace lud;
using lud::testing::thrown_code;

namespace {

Graph complete_graph(int n) { return generate_erdos_renyi(n, 1.0, 0); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

TEST_CASE("graph canonicalizes edges and rejects duplicates") {
  Graph g(4, {{2, 1}, {0, 3}});
  REQUIRE(g.num_edges() == 2);
  CHECK(g.edge(0) == Edge{0, 3});
  CHECK(g.edge(1) == Edge{1, 2});
  CHECK(g.find_edge(2, 1) == 1);
  CHECK(g.find_edge(0, 1) == -1);
  CHECK(thrown_code([] { Graph(3, {{1, 1}}); }) == ErrorCode::kInvalidArgument);
  CHECK(thrown_code([] { Graph(3, {{1, 2}, {2, 1}}); }) == ErrorCode::kInvalidArgument);
  CHECK(thrown_code([] { Graph(3, {{0, 3}}); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("connected components and induced subgraphs") {
  Graph g(5, {{0, 1}, {3, 4}});
  int count = 0;
  const auto labels = g.connected_component_labels(&count);
  CHECK(count == 3);
  CHECK(labels[0] == labels[1]);
  CHECK(labels[3] == labels[4]);
  CHECK(labels[2] != labels[0]);
  CHECK_FALSE(g.is_connected());

  const Graph sub = g.induced_subgraph({4, 3, 0});
  CHECK(sub.num_vertices() == 3);
  REQUIRE(sub.num_edges() == 1);
  CHECK(sub.edge(0) == Edge{0, 1});
}

TEST_CASE("erdos-renyi small cases") {
  const Graph k5 = generate_erdos_renyi(5, 1.0, 17);
  CHECK(k5.num_edges() == 10);
  const Graph pair = generate_erdos_renyi(2, 1.0, 3);
  REQUIRE(pair.num_edges() == 1);
  CHECK(pair.edge(0) == Edge{0, 1});
  CHECK(thrown_code([] { generate_erdos_renyi(1, 0.5, 0); }) == ErrorCode::kInvalidArgument);
  CHECK(thrown_code([] { generate_erdos_renyi(5, 0.0, 0); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("erdos-renyi edge count is binomial") {
  const double pairs = 1000.0 * 999.0 / 2.0;
  const double mean = 0.5 * pairs;
  const double sd = std::sqrt(pairs * 0.25);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = generate_erdos_renyi(1000, 0.5, seed);
    CHECK(std::abs(g.num_edges() - mean) <= 5.0 * sd);
  }
}

TEST_CASE("exact directions") {
  SUBCASE("unit x axis") {
    Eigen::MatrixXd t(2, 2);
    t << 0, 1, 0, 0;
    const Formation f = exact_directions(LocationSet(t), Graph(2, {{0, 1}}));
    CHECK(f.direction(0)[0] == -1.0);
    CHECK(f.direction(0)[1] == 0.0);
  }
  SUBCASE("body diagonal") {
    Eigen::MatrixXd t(3, 2);
    t << 0, 1, 0, 1, 0, 1;
    const Formation f = exact_directions(LocationSet(t), Graph(2, {{0, 1}}));
    const Eigen::Vector3d expected = -Eigen::Vector3d::Ones() / std::sqrt(3.0);
    CHECK((f.direction(0) - expected).norm() <= 1e-15);
  }
  SUBCASE("coincident endpoints") {
    Eigen::MatrixXd t(2, 3);
    t << 0, 0, 1, 0, 0, 2;
    CHECK(thrown_code([&] { exact_directions(LocationSet(t), Graph(3, {{0, 1}, {1, 2}})); }) ==
          ErrorCode::kDegeneratePair);
  }
}

TEST_CASE("reverse direction is the exact negation") {
  const LocationSet t = random_locations(12, 3, 5);
  const Formation f = exact_directions(t, generate_erdos_renyi(12, 0.6, 5));
  for (const Edge& e : f.graph().edges()) {
    const Eigen::VectorXd fwd = f.direction(e.i, e.j);
    const Eigen::VectorXd rev = f.direction(e.j, e.i);
    for (int k = 0; k < 3; ++k) CHECK(rev[k] == -fwd[k]);
  }
  CHECK(thrown_code([&] {
          Formation(Graph(2, {{0, 1}}), Eigen::MatrixXd::Constant(2, 1, 1.0));
        }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("random locations") {
  const LocationSet two = random_locations(2, 2, 9);
  CHECK(two.point(0) != two.point(1));

  CHECK(random_locations(30, 3, 77).points() == random_locations(30, 3, 77).points());
  CHECK(random_locations(30, 3, 77).points() != random_locations(30, 3, 78).points());

  const LocationSet big = random_locations(10000, 3, 2024);
  for (int k = 0; k < 3; ++k) {
    const Eigen::VectorXd row = big.points().row(k).transpose();
    const double mean = row.mean();
    const double var = (row.array() - mean).square().sum() / (row.size() - 1);
    CHECK(std::abs(mean) <= 0.1);
    CHECK(var >= 0.9);
    CHECK(var <= 1.1);
  }
}

TEST_CASE("noiseless corruption is the identity") {
  const Formation f = exact_directions(random_locations(20, 3, 1), generate_erdos_renyi(20, 0.5, 1));
  const Formation g = corrupt_directions(f, {0.0, 0.0, 99});
  CHECK(g.directions() == f.directions());
  CHECK(g.graph().edges() == f.graph().edges());
}

TEST_CASE("corruption keeps unit norms and is deterministic") {
  const Formation f = exact_directions(random_locations(40, 2, 3), generate_erdos_renyi(40, 0.4, 3));
  for (double p : {0.0, 0.3, 1.0}) {
    for (double sigma : {0.0, 0.1, 2.0}) {
      const Formation g = corrupt_directions(f, {p, sigma, 12});
      for (int e = 0; e < g.num_edges(); ++e) {
        CHECK(std::abs(g.direction(e).norm() - 1.0) <= 1e-12);
      }
      CHECK(corrupt_directions(f, {p, sigma, 12}).directions() == g.directions());
    }
  }
  CHECK(thrown_code([&] { corrupt_directions(f, {1.5, 0.0, 0}); }) == ErrorCode::kInvalidArgument);
  CHECK(thrown_code([&] { corrupt_directions(f, {0.5, -1.0, 0}); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("all-outlier directions average out") {
  const Formation f = exact_directions(random_locations(50, 3, 4), complete_graph(50));
  REQUIRE(f.num_edges() >= 1000);
  const Formation g = corrupt_directions(f, {1.0, 0.0, 4});
  const Eigen::VectorXd mean = g.directions().rowwise().mean();
  CHECK(mean.norm() <= 0.1);
}

TEST_CASE("gaussian corruption matches a direct simulation") {
  const Formation f = exact_directions(random_locations(150, 3, 8), complete_graph(150));
  REQUIRE(f.num_edges() >= 10000);
  const double sigma = 0.05;
  const Formation g = corrupt_directions(f, {0.0, sigma, 8});
  std::vector<double> errors;
  for (int e = 0; e < f.num_edges(); ++e) {
    errors.push_back(angular_error(g.direction(e), f.direction(e)));
  }

  // The error distribution does not depend on gamma, so simulate about e_1.
  std::mt19937 rng(8);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> simulated;
  for (int k = 0; k < f.num_edges(); ++k) {
    const double x = 1.0 + sigma * normal(rng);
    const double y = sigma * normal(rng);
    const double z = sigma * normal(rng);
    simulated.push_back(std::atan2(std::hypot(y, z), x));
  }
  const double ours = median(errors);
  const double oracle = median(simulated);
  CHECK(std::abs(ours - oracle) <= 0.2 * oracle);
}

TEST_CASE("seed streams are independent") {
  const std::uint64_t a = derive_seed(1, Stream::kGraph, {0, 0});
  const std::uint64_t b = derive_seed(1, Stream::kLocations, {0, 0});
  const std::uint64_t c = derive_seed(1, Stream::kGraph, {0, 1});
  CHECK(a != b);
  CHECK(a != c);
  CHECK(derive_seed(1, Stream::kGraph, {0, 0}) == a);

  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    CHECK(std::abs(uniform_unit_vector(rng, 4).norm() - 1.0) <= 1e-12);
  }
}

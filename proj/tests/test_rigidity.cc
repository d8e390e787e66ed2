#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "lud/error.h"
#include "lud/formation.h"
#include "lud/rigidity.h"
#include "oracles.h"

using namespace lud;
using lud::testing::bowtie;
using lud::testing::bowtie_with_bridge;
using lud::testing::rigidity_by_enumeration;
using lud::testing::thrown_code;

namespace {

Graph triangle() { return Graph(3, {{0, 1}, {0, 2}, {1, 2}}); }

// Graph on n vertices whose edge set is the bitmask over all pairs i < j.
Graph graph_from_mask(int n, unsigned mask) {
  std::vector<Edge> edges;
  int bit = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++bit) {
      if (mask >> bit & 1u) edges.push_back({i, j});
    }
  }
  return Graph(n, edges);
}

}  // namespace

TEST_CASE("oracle hand examples") {
  CHECK(theorem1_oracle(triangle(), 2));
  CHECK_FALSE(theorem1_oracle(Graph(3, {{0, 1}, {1, 2}}), 2));
  CHECK(theorem1_oracle(Graph(2, {{0, 1}}), 2));
  CHECK(theorem1_oracle(Graph(2, {{0, 1}}), 3));
  CHECK(theorem1_oracle(generate_erdos_renyi(4, 1.0, 0), 2));
  CHECK(theorem1_oracle(triangle(), 3));
  CHECK_FALSE(theorem1_oracle(bowtie(), 2));
  CHECK(theorem1_oracle(bowtie_with_bridge(), 2));
  CHECK(thrown_code([] { theorem1_oracle(generate_erdos_renyi(9, 1.0, 0), 2); }) ==
        ErrorCode::kOracleSize);
  CHECK(thrown_code([] { theorem1_oracle(Graph(1, {}), 2); }) == ErrorCode::kTrivialInput);
}

TEST_CASE("oracle matches literal enumeration over sub-multisets") {
  for (int d : {2, 3}) {
    for (int n = 2; n <= 4; ++n) {
      const unsigned pairs = n * (n - 1) / 2;
      for (unsigned mask = 0; mask < (1u << pairs); ++mask) {
        const Graph g = graph_from_mask(n, mask);
        CAPTURE(d);
        CAPTURE(n);
        CAPTURE(mask);
        CHECK(theorem1_oracle(g, d) == rigidity_by_enumeration(g, d, true));
      }
    }
  }
}

TEST_CASE("oracle matches enumeration on five vertices") {
  for (int d : {2, 3}) {
    for (unsigned mask = 0; mask < (1u << 10); ++mask) {
      const Graph g = graph_from_mask(5, mask);
      CAPTURE(d);
      CAPTURE(mask);
      CHECK(theorem1_oracle(g, d) == rigidity_by_enumeration(g, d, false));
    }
  }
}

TEST_CASE("oracle matches enumeration on random six-vertex graphs") {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 150; ++k) {
    const Graph g = graph_from_mask(6, static_cast<unsigned>(rng() & 0x7fffu));
    CAPTURE(k);
    CHECK(theorem1_oracle(g, 2) == rigidity_by_enumeration(g, 2, false));
  }
}

TEST_CASE("spectral test hand examples") {
  const RigidityReport k4 = spectral_rigidity_test(generate_erdos_renyi(4, 1.0, 0), 2, 1);
  CHECK(k4.is_parallel_rigid);
  CHECK(k4.measured_rank == 5);
  CHECK(k4.required_rank == 5);

  const RigidityReport tri = spectral_rigidity_test(triangle(), 3, 1);
  CHECK(tri.is_parallel_rigid);
  CHECK(tri.measured_rank == 5);

  const RigidityReport bow = spectral_rigidity_test(bowtie(), 2, 1);
  CHECK_FALSE(bow.is_parallel_rigid);
  CHECK(bow.measured_rank == 6);
  CHECK(bow.required_rank == 7);
  CHECK(bow.nullspace_dim_beyond_trivial == 1);

  const RigidityReport split = spectral_rigidity_test(Graph(4, {{0, 1}, {2, 3}}), 2, 1);
  CHECK_FALSE(split.is_parallel_rigid);
  CHECK(split.num_connected_components == 2);

  CHECK(thrown_code([] { spectral_rigidity_test(Graph(1, {}), 2, 0); }) ==
        ErrorCode::kTrivialInput);
}

TEST_CASE("spectral test agrees with the oracle on every connected graph up to 6 vertices") {
  int compared = 0;
  for (int d : {2, 3}) {
    for (int n = 2; n <= 6; ++n) {
      const unsigned pairs = n * (n - 1) / 2;
      for (unsigned mask = 0; mask < (1u << pairs); ++mask) {
        const Graph g = graph_from_mask(n, mask);
        if (!g.is_connected()) continue;
        const RigidityReport r = spectral_rigidity_test(g, d, mask + 1000u * n);
        CAPTURE(d);
        CAPTURE(n);
        CAPTURE(mask);
        CHECK(r.is_parallel_rigid == theorem1_oracle(g, d));
        // Translations and scale are always in the nullspace.
        CHECK(r.nullspace_dim_beyond_trivial >= 0);
        CHECK((r.nullspace_dim_beyond_trivial == 0) == r.is_parallel_rigid);
        CHECK(r.is_parallel_rigid == (r.measured_rank == r.required_rank));
        ++compared;
      }
    }
  }
  CHECK(compared > 26000);
}

TEST_CASE("constraint matrix annihilates the realization") {
  const LocationSet t = random_locations(7, 3, 4);
  const Graph g = generate_erdos_renyi(7, 0.6, 4);
  const Eigen::MatrixXd m = direction_constraint_matrix(g, t.points());
  REQUIRE(m.rows() == 2 * g.num_edges());
  REQUIRE(m.cols() == 21);
  const Eigen::Map<const Eigen::VectorXd> x(t.points().data(), 21);
  CHECK((m * x).norm() <= 1e-12);
  // Each row block is an orthonormal basis.
  for (int e = 0; e < g.num_edges(); ++e) {
    const Eigen::MatrixXd block = m.block(2 * e, 3 * g.edge(e).i, 2, 3);
    CHECK((block * block.transpose() - Eigen::Matrix2d::Identity()).norm() <= 1e-12);
  }
}

TEST_CASE("adding an edge keeps a rigid graph rigid") {
  std::mt19937_64 rng(42);
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 100; ++seed) {
    const int n = 5 + static_cast<int>(seed % 10);
    const Graph g = generate_erdos_renyi(n, 0.45, seed);
    if (!spectral_rigidity_test(g, 3, seed).is_parallel_rigid) continue;
    std::vector<Edge> missing;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (g.find_edge(i, j) < 0) missing.push_back({i, j});
      }
    }
    if (missing.empty()) continue;
    std::vector<Edge> edges = g.edges();
    edges.push_back(missing[rng() % missing.size()]);
    CHECK(spectral_rigidity_test(Graph(n, edges), 3, seed + 1).is_parallel_rigid);
    ++checked;
  }
}

TEST_CASE("reports are deterministic per seed") {
  const Graph g = generate_erdos_renyi(15, 0.25, 3);
  for (int d : {2, 3}) {
    const RigidityReport a = extract_maximal_components(g, d, 77);
    const RigidityReport b = extract_maximal_components(g, d, 77);
    CHECK(a.is_parallel_rigid == b.is_parallel_rigid);
    CHECK(a.measured_rank == b.measured_rank);
    CHECK(a.components == b.components);
  }
}

TEST_CASE("maximal components of the bowtie family") {
  for (int d : {2, 3}) {
    const RigidityReport bow = extract_maximal_components(bowtie(), d, 5);
    CHECK(bow.components == std::vector<std::vector<int>>{{0, 1, 2}, {2, 3, 4}});

    const RigidityReport bridged = extract_maximal_components(bowtie_with_bridge(), d, 5);
    CHECK(bridged.is_parallel_rigid);
    CHECK(bridged.components == std::vector<std::vector<int>>{{0, 1, 2, 3, 4}});
  }
}

TEST_CASE("components pass the rigidity test in isolation") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Graph g = generate_erdos_renyi(14, 0.22, seed);
    if (g.num_edges() == 0) continue;
    for (int d : {2, 3}) {
      const RigidityReport r = extract_maximal_components(g, d, seed);
      for (const auto& c : r.components) {
        REQUIRE(c.size() >= 2);
        CHECK(std::is_sorted(c.begin(), c.end()));
        CHECK(spectral_rigidity_test(g.induced_subgraph(c), d, seed + 9).is_parallel_rigid);
      }
      // Every edge lies in some component.
      for (const Edge& e : g.edges()) {
        const bool covered = std::any_of(r.components.begin(), r.components.end(),
                                         [&](const std::vector<int>& c) {
                                           return std::binary_search(c.begin(), c.end(), e.i) &&
                                                  std::binary_search(c.begin(), c.end(), e.j);
                                         });
        CHECK(covered);
      }
    }
  }
}

TEST_CASE("largest component restriction") {
  SUBCASE("rigid input is the identity") {
    const Formation f = exact_directions(random_locations(6, 2, 1), generate_erdos_renyi(6, 1.0, 1));
    const Restriction r = largest_component_restriction(f, extract_maximal_components(f.graph(), 2, 1));
    CHECK(r.vertex_map == std::vector<int>{0, 1, 2, 3, 4, 5});
    CHECK(r.formation.directions() == f.directions());
  }
  SUBCASE("bowtie ties go to the triangle with vertex 0") {
    const Formation f = exact_directions(random_locations(5, 2, 2), bowtie());
    const Restriction r = largest_component_restriction(f, extract_maximal_components(f.graph(), 2, 2));
    CHECK(r.vertex_map == std::vector<int>{0, 1, 2});
    CHECK(r.formation.num_edges() == 3);
  }
  SUBCASE("a pendant vertex is excluded") {
    std::vector<Edge> edges = bowtie().edges();
    edges.push_back({4, 5});
    const Formation f = exact_directions(random_locations(6, 3, 3), Graph(6, edges));
    const RigidityReport report = extract_maximal_components(f.graph(), 3, 3);
    const Restriction r = largest_component_restriction(f, report);
    CHECK(r.vertex_map.size() == 3);
    CHECK(std::find(r.vertex_map.begin(), r.vertex_map.end(), 5) == r.vertex_map.end());
    // Directions are carried over unchanged.
    for (int e = 0; e < r.formation.num_edges(); ++e) {
      const Edge& ed = r.formation.graph().edge(e);
      CHECK(r.formation.direction(e) ==
            f.direction(r.vertex_map[ed.i], r.vertex_map[ed.j]));
    }
  }
  SUBCASE("no usable component") {
    RigidityReport empty;
    const Formation f = exact_directions(random_locations(3, 2, 4), Graph(3, {{0, 1}}));
    CHECK(thrown_code([&] { largest_component_restriction(f, empty); }) ==
          ErrorCode::kNoWellPosedSubproblem);
  }
}

#include <doctest.h>

#include <atomic>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lud/error.h"
#include "lud/formation.h"
#include "lud/harness.h"
#include "lud/rigidity.h"
#include "oracles.h"

using namespace lud;
using lud::testing::thrown_code;

namespace {

ExperimentSpec small_grid() {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::kPhaseGrid;
  spec.dimension = 3;
  spec.n = 20;
  spec.q = {0.6, 1.0};
  spec.p = {0.0, 0.2};
  spec.trials = 3;
  spec.seed = 5;
  return spec;
}

std::string cells_text(const ExperimentSpec& spec, const GridResult& r) {
  std::ostringstream out;
  write_cells_csv(out, spec, r);
  write_instances_csv(out, spec, r);
  return out.str();
}

}  // namespace

TEST_CASE("spec parsing") {
  const ExperimentSpec spec = parse_experiment_spec(R"({
    "kind": "compare", "d": 2, "n": 30, "q": 0.5, "p": [0.1, 0.2],
    "sigma": 0.05, "trials": 4, "seed": 9, "solvers": ["lud", "ls"],
    "solver": {"scale_floor": 2.0, "irls_tol": 1e-9}
  })");
  CHECK(spec.kind == ExperimentKind::kCompare);
  CHECK(spec.dimension == 2);
  CHECK(spec.n == 30);
  CHECK(spec.q == std::vector<double>{0.5});
  CHECK(spec.p == std::vector<double>{0.1, 0.2});
  CHECK(spec.sigma == std::vector<double>{0.05});
  CHECK(spec.trials == 4);
  CHECK(spec.seed == 9);
  CHECK(spec.solvers == std::vector<std::string>{"lud", "ls"});
  CHECK(spec.solver.scale_floor == 2.0);
  CHECK(spec.solver.irls_tol == 1e-9);
}

TEST_CASE("spec errors") {
  const char* bad[] = {
      "{",
      "[]",
      R"({"d": 3})",
      R"({"kind": "phase-grid", "bogus": 1})",
      R"({"kind": "nope"})",
      R"({"kind": "phase-grid", "trials": 0})",
      R"({"kind": "phase-grid", "q": []})",
      R"({"kind": "phase-grid", "q": [1.5]})",
      R"({"kind": "phase-grid", "p": [-0.1]})",
      R"({"kind": "phase-grid", "n": "ten"})",
      R"({"kind": "compare", "solvers": ["sdr"]})",
      R"({"kind": "phase-grid", "solver": {"scale_floor": 0}})",
      R"({"kind": "phase-grid", "solver": {"mystery": 1}})",
      R"({"kind": "directions", "methods": ["ransac"]})",
      R"({"kind": "directions", "outlier_frac": [1.0]})",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK(thrown_code([&] { parse_experiment_spec(text); }) == ErrorCode::kSpec);
  }
  CHECK(thrown_code([] { load_experiment_spec("/nonexistent/spec.json"); }) == ErrorCode::kSpec);
}

TEST_CASE("noiseless complete graphs are recovered exactly") {
  ExperimentSpec spec = small_grid();
  spec.q = {1.0};
  spec.p = {0.0};
  const GridResult r = run_phase_grid(spec);
  REQUIRE(r.cells.size() == 1);
  CHECK(r.cells[0].trials_recorded == 3);
  CHECK(r.cells[0].mean_nrmse <= 1e-6);
  CHECK(r.cells[0].exact_recoveries == 3);
  CHECK_FALSE(r.cells[0].unattainable);
}

TEST_CASE("grid output is deterministic across reruns and thread counts") {
  ExperimentSpec spec = small_grid();
  const std::string once = cells_text(spec, run_phase_grid(spec));
  const std::string again = cells_text(spec, run_phase_grid(spec));
  CHECK(once == again);
  spec.threads = 3;
  CHECK(cells_text(spec, run_phase_grid(spec)) == once);

  ExperimentSpec other = small_grid();
  other.seed = 6;
  CHECK(cells_text(other, run_phase_grid(other)) != once);
}

TEST_CASE("every recorded instance was rigid") {
  ExperimentSpec spec = small_grid();
  spec.q = {0.25};
  spec.n = 12;
  const GridResult r = run_phase_grid(spec);
  REQUIRE_FALSE(r.instances.empty());
  for (const InstanceRecord& rec : r.instances) {
    const Graph g = generate_erdos_renyi(spec.n, rec.q, rec.graph_seed);
    CHECK(g.num_edges() == rec.num_edges);
    CHECK(spectral_rigidity_test(g, spec.dimension, rec.graph_seed).is_parallel_rigid);
  }
}

TEST_CASE("graph and locations are shared across noise levels") {
  ExperimentSpec spec = small_grid();
  const GridResult r = run_phase_grid(spec);
  for (const InstanceRecord& a : r.instances) {
    for (const InstanceRecord& b : r.instances) {
      if (a.q == b.q && a.trial == b.trial) {
        CHECK(a.graph_seed == b.graph_seed);
        CHECK(a.location_seed == b.location_seed);
        if (a.p != b.p) CHECK(a.noise_seed != b.noise_seed);
      }
    }
  }
}

TEST_CASE("sparse cells are marked unattainable") {
  ExperimentSpec spec = small_grid();
  spec.q = {0.05};
  spec.p = {0.0};
  spec.max_retries = 2;
  const GridResult r = run_phase_grid(spec);
  REQUIRE(r.cells.size() == 1);
  CHECK(r.cells[0].unattainable);
  CHECK(r.cells[0].trials_recorded < spec.trials);
}

TEST_CASE("comparison on noiseless data") {
  ExperimentSpec spec = small_grid();
  spec.kind = ExperimentKind::kCompare;
  spec.q = {0.6};
  spec.p = {0.0};
  spec.solvers = {"lud", "cls", "ls"};
  const GridResult r = run_compare(spec);
  REQUIRE(r.cells.size() == 3);
  for (const CellSummary& c : r.cells) {
    CAPTURE(c.solver);
    CHECK(c.mean_nrmse <= 1e-6);
  }
  // Every solver saw the same formations.
  for (const InstanceRecord& a : r.instances) {
    for (const InstanceRecord& b : r.instances) {
      if (a.trial == b.trial) CHECK(a.noise_seed == b.noise_seed);
    }
  }
}

TEST_CASE("csv metadata header") {
  ExperimentSpec spec = small_grid();
  spec.q = {1.0};
  spec.p = {0.0};
  spec.trials = 1;
  std::ostringstream out;
  write_cells_csv(out, spec, run_phase_grid(spec));
  const std::string text = out.str();
  for (const char* key : {"# kind=phase-grid", "# seed=5", "# n=20", "# trials=1", "# q=1"}) {
    CAPTURE(key);
    CHECK(text.find(key) != std::string::npos);
  }
  CHECK(text.find("\nq,p,sigma,solver,") != std::string::npos);
}

TEST_CASE("direction comparison") {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::kDirections;
  spec.cameras = 8;
  spec.points = 80;
  spec.trials = 2;
  spec.seed = 3;
  spec.rot_noise = {0.0};
  spec.outlier_frac = {0.0, 0.3};
  const DirectionsResult r = run_directions_compare(spec);
  REQUIRE(r.summaries.size() == 4);
  for (const DirectionSummary& s : r.summaries) {
    CHECK(s.histogram.size() == kHistogramBins);
    CHECK(s.num_pairs + s.skipped_pairs == 2 * 28);
    if (s.outlier_frac == 0.0) CHECK(s.median <= 1e-6);
  }
  auto find = [&](double frac, const std::string& method) {
    for (const auto& s : r.summaries) {
      if (s.outlier_frac == frac && s.method == method) return s;
    }
    FAIL("missing summary");
    return DirectionSummary{};
  };
  CHECK(find(0.3, "robust").median < find(0.3, "pca").median);

  std::ostringstream a, b;
  write_pairs_csv(a, spec, r);
  write_direction_summary_csv(a, spec, r);
  const DirectionsResult again = run_directions_compare(spec);
  write_pairs_csv(b, spec, again);
  write_direction_summary_csv(b, spec, again);
  CHECK(a.str() == b.str());
}

TEST_CASE("parallel_for runs every index and rethrows") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](int k) { hits[k]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](int k) {
                                 if (k == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

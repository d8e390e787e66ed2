#include "lud/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "lud/directions.h"
#include "lud/error.h"
#include "lud/eval.h"
#include "lud/formation.h"
#include "lud/io.h"
#include "lud/random.h"
#include "lud/rigidity.h"

namespace lud {
namespace {

using nlohmann::json;

[[noreturn]] void spec_error(const std::string& what) {
  throw Error(ErrorCode::kSpec, what);
}

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) spec_error("'" + key + "' must be a number");
  return v.get<double>();
}

int get_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) spec_error("'" + key + "' must be an integer");
  const auto x = v.get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    spec_error("'" + key + "' is out of range");
  }
  return static_cast<int>(x);
}

std::vector<double> get_grid(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array() || v.empty()) {
    spec_error("'" + key + "' must be a number or a non-empty array of numbers");
  }
  std::vector<double> out;
  for (const auto& x : v) out.push_back(get_number(x, key));
  return out;
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) spec_error("'" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> get_strings(const json& v, const std::string& key) {
  if (v.is_string()) return {v.get<std::string>()};
  if (!v.is_array() || v.empty()) {
    spec_error("'" + key + "' must be a string or a non-empty array of strings");
  }
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string()) spec_error("'" + key + "' entries must be strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

ExperimentKind parse_kind(const std::string& s) {
  for (auto k : {ExperimentKind::kPhaseGrid, ExperimentKind::kCompare,
                 ExperimentKind::kDirections, ExperimentKind::kSolve,
                 ExperimentKind::kRigidity}) {
    if (s == to_string(k)) return k;
  }
  spec_error("unknown kind '" + s + "'");
}

void parse_solver(const json& v, SolverConfig* c) {
  if (!v.is_object()) spec_error("'solver' must be an object");
  for (const auto& [key, val] : v.items()) {
    if (key == "scale_floor") c->scale_floor = get_number(val, key);
    else if (key == "irls_delta") c->irls_delta = get_number(val, key);
    else if (key == "irls_tol") c->irls_tol = get_number(val, key);
    else if (key == "max_outer_iters") c->max_outer_iters = get_int(val, key);
    else if (key == "inner_tol") c->inner_tol = get_number(val, key);
    else if (key == "inner_max_iters") c->inner_max_iters = get_int(val, key);
    else spec_error("unknown solver key '" + key + "'");
  }
}

bool all_of(const std::vector<double>& v, bool (*ok)(double)) {
  return std::all_of(v.begin(), v.end(), ok);
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ";" : "") + format_double(v[k]);
  return s;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ";" : "") + v[k];
  return s;
}

SolverResult run_solver(const std::string& name, const Formation& f, const SolverConfig& c) {
  if (name == "lud") return solve_lud(f, c);
  if (name == "cls") return solve_cls(f, c);
  return solve_ls(f, c);
}

struct RigidDraw {
  Graph graph;
  int attempt = 0;
  std::uint64_t graph_seed = 0;
  std::uint64_t location_seed = 0;
};

GridResult run_grid(const ExperimentSpec& spec, const std::vector<std::string>& solvers) {
  validate_experiment_spec(spec);
  const int nq = static_cast<int>(spec.q.size());
  const int np = static_cast<int>(spec.p.size());
  const int ns = static_cast<int>(spec.sigma.size());
  const int nt = spec.trials;
  using U = std::uint64_t;

  // One rigid graph per (q, trial), shared by every p and sigma.
  std::vector<std::optional<RigidDraw>> draws(nq * nt);
  parallel_for(nq * nt, spec.threads, [&](int item) {
    const int qi = item / nt, t = item % nt;
    for (int a = 0; a <= spec.max_retries; ++a) {
      const std::initializer_list<U> path = {U(qi), U(t), U(a)};
      RigidDraw draw;
      draw.attempt = a;
      draw.graph_seed = derive_seed(spec.seed, Stream::kGraph, path);
      draw.location_seed = derive_seed(spec.seed, Stream::kLocations, path);
      draw.graph = generate_erdos_renyi(spec.n, spec.q[qi], draw.graph_seed);
      if (!draw.graph.is_connected()) continue;
      const auto report = spectral_rigidity_test(
          draw.graph, spec.dimension, derive_seed(spec.seed, Stream::kRealization, path));
      if (report.is_parallel_rigid) {
        draws[item] = std::move(draw);
        return;
      }
    }
  });

  const int cells = nq * np * ns;
  std::vector<std::vector<InstanceRecord>> slots(cells * nt);
  parallel_for(cells * nt, spec.threads, [&](int item) {
    const int t = item % nt;
    const int cell = item / nt;
    const int si = cell % ns, pi = (cell / ns) % np, qi = cell / (ns * np);
    const auto& draw = draws[qi * nt + t];
    if (!draw) return;
    const std::initializer_list<U> path = {U(qi), U(pi), U(si), U(t)};
    const U noise_seed = derive_seed(spec.seed, Stream::kNoise, path);
    const LocationSet truth = random_locations(spec.n, spec.dimension, draw->location_seed);
    const Formation formation = corrupt_directions(
        exact_directions(truth, draw->graph), {spec.p[pi], spec.sigma[si], noise_seed});
    SolverConfig config = spec.solver;
    config.check_rigidity = false;
    config.seed = derive_seed(spec.seed, Stream::kInit, path);
    for (const auto& name : solvers) {
      const SolverResult res = run_solver(name, formation, config);
      InstanceRecord rec;
      rec.q = spec.q[qi];
      rec.p = spec.p[pi];
      rec.sigma = spec.sigma[si];
      rec.trial = t;
      rec.attempt = draw->attempt;
      rec.graph_seed = draw->graph_seed;
      rec.location_seed = draw->location_seed;
      rec.noise_seed = noise_seed;
      rec.num_edges = formation.num_edges();
      rec.solver = name;
      rec.nrmse = align_scale_translation(res.locations, truth).nrmse;
      rec.converged = res.converged;
      rec.iterations = res.iterations;
      slots[item].push_back(std::move(rec));
    }
  });

  GridResult result;
  for (int cell = 0; cell < cells; ++cell) {
    const int si = cell % ns, pi = (cell / ns) % np, qi = cell / (ns * np);
    bool unattainable = false;
    for (int t = 0; t < nt; ++t) unattainable |= !draws[qi * nt + t].has_value();
    for (const auto& name : solvers) {
      CellSummary c;
      c.q = spec.q[qi];
      c.p = spec.p[pi];
      c.sigma = spec.sigma[si];
      c.solver = name;
      c.unattainable = unattainable;
      double sum = 0.0;
      for (int t = 0; t < nt; ++t) {
        for (const auto& r : slots[cell * nt + t]) {
          if (r.solver != name) continue;
          ++c.trials_recorded;
          sum += r.nrmse;
          c.exact_recoveries += r.nrmse <= spec.exact_threshold ? 1 : 0;
        }
      }
      c.mean_nrmse = c.trials_recorded > 0 ? sum / c.trials_recorded
                                           : std::numeric_limits<double>::quiet_NaN();
      result.cells.push_back(std::move(c));
    }
  }
  for (auto& s : slots) {
    for (auto& r : s) result.instances.push_back(std::move(r));
  }
  auto key = [](const InstanceRecord& r) {
    return std::tie(r.q, r.p, r.sigma, r.trial, r.solver);
  };
  std::stable_sort(result.instances.begin(), result.instances.end(),
                   [&](const auto& a, const auto& b) { return key(a) < key(b); });

  auto ckey = [](const CellSummary& c) { return std::tie(c.q, c.p, c.sigma, c.solver); };
  std::stable_sort(result.cells.begin(), result.cells.end(),
                   [&](const auto& a, const auto& b) { return ckey(a) < ckey(b); });
  return result;
}

// Linear interpolation between order statistics.
double quantile(std::vector<double> v, double level) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = level * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kPhaseGrid: return "phase-grid";
    case ExperimentKind::kCompare: return "compare";
    case ExperimentKind::kDirections: return "directions";
    case ExperimentKind::kSolve: return "solve";
    case ExperimentKind::kRigidity: return "rigidity";
  }
  return "unknown";
}

ExperimentSpec parse_experiment_spec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    spec_error(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) spec_error("spec must be a JSON object");
  if (!doc.contains("kind") || !doc["kind"].is_string()) {
    spec_error("spec needs a string 'kind'");
  }
  ExperimentSpec s;
  for (const auto& [key, v] : doc.items()) {
    if (key == "kind") s.kind = parse_kind(v.get<std::string>());
    else if (key == "d") s.dimension = get_int(v, key);
    else if (key == "n") s.n = get_int(v, key);
    else if (key == "q") s.q = get_grid(v, key);
    else if (key == "p") s.p = get_grid(v, key);
    else if (key == "sigma") s.sigma = get_grid(v, key);
    else if (key == "trials") s.trials = get_int(v, key);
    else if (key == "seed") {
      if (!v.is_number_unsigned()) spec_error("'seed' must be a non-negative integer");
      s.seed = v.get<std::uint64_t>();
    } else if (key == "solvers") s.solvers = get_strings(v, key);
    else if (key == "out") s.out = get_string(v, key);
    else if (key == "threads") s.threads = get_int(v, key);
    else if (key == "max_retries") s.max_retries = get_int(v, key);
    else if (key == "exact_threshold") s.exact_threshold = get_number(v, key);
    else if (key == "solver") parse_solver(v, &s.solver);
    else if (key == "cameras") s.cameras = get_int(v, key);
    else if (key == "points") s.points = get_int(v, key);
    else if (key == "rot_noise") s.rot_noise = get_grid(v, key);
    else if (key == "outlier_frac") s.outlier_frac = get_grid(v, key);
    else if (key == "methods") s.methods = get_strings(v, key);
    else if (key == "formation") s.formation = get_string(v, key);
    else if (key == "truth") s.truth = get_string(v, key);
    else if (key == "trace") s.trace = get_string(v, key);
    else if (key == "method") s.method = get_string(v, key);
    else if (key == "oracle") {
      if (!v.is_boolean()) spec_error("'oracle' must be a boolean");
      s.oracle = v.get<bool>();
    }
    else spec_error("unknown key '" + key + "'");
  }
  validate_experiment_spec(s);
  return s;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) spec_error("cannot open spec file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_spec(buf.str());
}

void validate_experiment_spec(const ExperimentSpec& s) {
  if (s.dimension < 2) spec_error("d must be >= 2");
  if (s.n < 2) spec_error("n must be >= 2");
  if (s.q.empty() || !all_of(s.q, [](double x) { return x > 0.0 && x <= 1.0; })) {
    spec_error("q values must lie in (0, 1]");
  }
  if (s.p.empty() || !all_of(s.p, [](double x) { return x >= 0.0 && x <= 1.0; })) {
    spec_error("p values must lie in [0, 1]");
  }
  if (s.sigma.empty() ||
      !all_of(s.sigma, [](double x) { return x >= 0.0 && std::isfinite(x); })) {
    spec_error("sigma values must be finite and >= 0");
  }
  if (s.trials < 1) spec_error("trials must be >= 1");
  if (s.threads < 1) spec_error("threads must be >= 1");
  if (s.max_retries < 0) spec_error("max_retries must be >= 0");
  if (!(s.exact_threshold > 0.0)) spec_error("exact_threshold must be > 0");
  if (s.solvers.empty()) spec_error("solvers must not be empty");
  for (const auto& name : s.solvers) {
    if (name != "lud" && name != "cls" && name != "ls") {
      spec_error("unknown solver '" + name + "' (lud, cls, ls)");
    }
  }
  const SolverConfig& c = s.solver;
  if (!(c.scale_floor > 0.0) || !(c.irls_delta > 0.0) || !(c.irls_tol > 0.0) ||
      !(c.inner_tol > 0.0) || c.max_outer_iters < 1 || c.inner_max_iters < 1) {
    spec_error("solver settings need c > 0, delta > 0, tolerances > 0, iteration limits >= 1");
  }
  if (s.cameras < 2) spec_error("cameras must be >= 2");
  if (s.points < 2) spec_error("points must be >= 2");
  if (s.rot_noise.empty() ||
      !all_of(s.rot_noise, [](double x) { return x >= 0.0 && std::isfinite(x); })) {
    spec_error("rot_noise values must be finite and >= 0");
  }
  if (s.outlier_frac.empty() ||
      !all_of(s.outlier_frac, [](double x) { return x >= 0.0 && x < 1.0; })) {
    spec_error("outlier_frac values must lie in [0, 1)");
  }
  if (s.method != "lud" && s.method != "cls" && s.method != "ls") {
    spec_error("unknown method '" + s.method + "' (lud, cls, ls)");
  }
  if (s.methods.empty()) spec_error("methods must not be empty");
  for (const auto& m : s.methods) {
    if (m != "robust" && m != "pca") spec_error("unknown method '" + m + "' (robust, pca)");
  }
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min(threads, count));
  std::atomic<int> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;
  std::mutex mu;
  auto work = [&] {
    for (int k = next++; k < count && !stop; k = next++) {
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

GridResult run_phase_grid(const ExperimentSpec& spec) { return run_grid(spec, {"lud"}); }

GridResult run_compare(const ExperimentSpec& spec) { return run_grid(spec, spec.solvers); }

DirectionsResult run_directions_compare(const ExperimentSpec& spec) {
  validate_experiment_spec(spec);
  using U = std::uint64_t;
  const int nr = static_cast<int>(spec.rot_noise.size());
  const int no = static_cast<int>(spec.outlier_frac.size());
  const int nm = static_cast<int>(spec.methods.size());
  const int nt = spec.trials;

  struct Slot {
    std::vector<PairRecord> pairs;
    int skipped = 0;
  };
  std::vector<Slot> slots(nr * no * nt);
  parallel_for(nr * no * nt, spec.threads, [&](int item) {
    const int t = item % nt, oi = (item / nt) % no, ri = item / (nt * no);
    const Scene scene = synth_scene(spec.cameras, spec.points,
                                    derive_seed(spec.seed, Stream::kScene, {U(t)}));
    const auto cams = perturb_rotations(
        scene.cameras, spec.rot_noise[ri],
        derive_seed(spec.seed, Stream::kNoise, {U(ri), U(t)}));
    Slot& slot = slots[item];
    int pair_index = 0;
    for (int i = 0; i < spec.cameras; ++i) {
      for (int j = i + 1; j < spec.cameras; ++j, ++pair_index) {
        SubspaceSampleSet set;
        try {
          set = build_nu_samples(cams, scene.observations, i, j);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kInsufficientSamples) throw;
          ++slot.skipped;
          continue;
        }
        const int inliers = static_cast<int>(set.samples.size());
        inject_outlier_samples(
            &set, spec.outlier_frac[oi],
            derive_seed(spec.seed, Stream::kOutliers, {U(ri), U(oi), U(t), U(pair_index)}));
        const Eigen::Vector3d truth =
            (scene.cameras[i].location - scene.cameras[j].location).normalized();
        std::vector<PairRecord> recs;
        try {
          for (const auto& method : spec.methods) {
            const LineEstimate est =
                method == "robust" ? estimate_line_robust(set) : estimate_line_pca(set);
            const SignVote vote = disambiguate_sign(est.line, cams, scene.observations, i, j);
            PairRecord r;
            r.trial = t;
            r.rot_noise = spec.rot_noise[ri];
            r.outlier_frac = spec.outlier_frac[oi];
            r.method = method;
            r.i = i;
            r.j = j;
            r.num_inliers = inliers;
            r.num_outliers = static_cast<int>(set.samples.size()) - inliers;
            r.gamma = vote.sign * est.line;
            r.angular_error = angular_error(r.gamma, truth);
            r.condition = est.condition;
            recs.push_back(std::move(r));
          }
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kSignAmbiguous && e.code() != ErrorCode::kEstimation) {
            throw;
          }
          ++slot.skipped;
          continue;
        }
        for (auto& r : recs) slot.pairs.push_back(std::move(r));
      }
    }
  });

  DirectionsResult result;
  for (int ri = 0; ri < nr; ++ri) {
    for (int oi = 0; oi < no; ++oi) {
      for (int mi = 0; mi < nm; ++mi) {
        DirectionSummary s;
        s.rot_noise = spec.rot_noise[ri];
        s.outlier_frac = spec.outlier_frac[oi];
        s.method = spec.methods[mi];
        s.histogram.assign(kHistogramBins, 0);
        std::vector<double> errors;
        for (int t = 0; t < nt; ++t) {
          const Slot& slot = slots[(ri * no + oi) * nt + t];
          s.skipped_pairs += slot.skipped;
          for (const auto& r : slot.pairs) {
            if (r.method != s.method) continue;
            errors.push_back(r.angular_error);
          }
        }
        s.num_pairs = static_cast<int>(errors.size());
        s.median = quantile(errors, 0.5);
        s.p90 = quantile(errors, 0.9);
        const double width = (std::numbers::pi / 4.0) / kHistogramBins;
        for (double e : errors) {
          if (e > std::numbers::pi / 4.0) continue;
          s.histogram[std::min(kHistogramBins - 1, static_cast<int>(e / width))]++;
        }
        result.summaries.push_back(std::move(s));
      }
    }
  }
  for (const auto& slot : slots) {
    for (const auto& r : slot.pairs) result.pairs.push_back(r);
  }
  auto key = [](const PairRecord& r) {
    return std::tie(r.rot_noise, r.outlier_frac, r.trial, r.i, r.j, r.method);
  };
  std::stable_sort(result.pairs.begin(), result.pairs.end(),
                   [&](const auto& a, const auto& b) { return key(a) < key(b); });
  auto skey = [](const DirectionSummary& s) {
    return std::tie(s.rot_noise, s.outlier_frac, s.method);
  };
  std::stable_sort(result.summaries.begin(), result.summaries.end(),
                   [&](const auto& a, const auto& b) { return skey(a) < skey(b); });
  return result;
}

void write_metadata(std::ostream& out, const ExperimentSpec& s) {
  out << "# tool=lud\n"
      << "# kind=" << to_string(s.kind) << "\n"
      << "# seed=" << s.seed << "\n"
      << "# trials=" << s.trials << "\n";
  if (s.kind == ExperimentKind::kDirections) {
    out << "# cameras=" << s.cameras << "\n"
        << "# points=" << s.points << "\n"
        << "# rot_noise=" << join(s.rot_noise) << "\n"
        << "# outlier_frac=" << join(s.outlier_frac) << "\n"
        << "# methods=" << join(s.methods) << "\n";
    return;
  }
  out << "# d=" << s.dimension << "\n"
      << "# n=" << s.n << "\n"
      << "# q=" << join(s.q) << "\n"
      << "# p=" << join(s.p) << "\n"
      << "# sigma=" << join(s.sigma) << "\n"
      << "# solvers="
      << (s.kind == ExperimentKind::kPhaseGrid ? std::string("lud") : join(s.solvers)) << "\n"
      << "# max_retries=" << s.max_retries << "\n"
      << "# exact_threshold=" << format_double(s.exact_threshold) << "\n"
      << "# solver.scale_floor=" << format_double(s.solver.scale_floor) << "\n"
      << "# solver.irls_delta=" << format_double(s.solver.irls_delta) << "\n"
      << "# solver.irls_tol=" << format_double(s.solver.irls_tol) << "\n"
      << "# solver.max_outer_iters=" << s.solver.max_outer_iters << "\n"
      << "# solver.inner_tol=" << format_double(s.solver.inner_tol) << "\n"
      << "# solver.inner_max_iters=" << s.solver.inner_max_iters << "\n";
}

void write_cells_csv(std::ostream& out, const ExperimentSpec& spec, const GridResult& result) {
  write_metadata(out, spec);
  out << "q,p,sigma,solver,trials_recorded,unattainable,mean_nrmse,log10_mean_nrmse,"
         "exact_recoveries\n";
  for (const auto& c : result.cells) {
    out << format_double(c.q) << ',' << format_double(c.p) << ',' << format_double(c.sigma)
        << ',' << c.solver << ',' << c.trials_recorded << ',' << (c.unattainable ? 1 : 0)
        << ',' << format_double(c.mean_nrmse) << ','
        << format_double(std::log10(c.mean_nrmse)) << ',' << c.exact_recoveries << '\n';
  }
}

void write_instances_csv(std::ostream& out, const ExperimentSpec& spec,
                         const GridResult& result) {
  write_metadata(out, spec);
  out << "q,p,sigma,trial,attempt,graph_seed,location_seed,noise_seed,num_edges,solver,"
         "nrmse,converged,iterations\n";
  for (const auto& r : result.instances) {
    out << format_double(r.q) << ',' << format_double(r.p) << ',' << format_double(r.sigma)
        << ',' << r.trial << ',' << r.attempt << ',' << r.graph_seed << ','
        << r.location_seed << ',' << r.noise_seed << ',' << r.num_edges << ',' << r.solver
        << ',' << format_double(r.nrmse) << ',' << (r.converged ? 1 : 0) << ','
        << r.iterations << '\n';
  }
}

void write_pairs_csv(std::ostream& out, const ExperimentSpec& spec,
                     const DirectionsResult& result) {
  write_metadata(out, spec);
  out << "trial,rot_noise,outlier_frac,method,i,j,num_inliers,num_outliers,gamma_x,gamma_y,"
         "gamma_z,angular_error_to_truth_rad,condition_flag\n";
  for (const auto& r : result.pairs) {
    out << r.trial << ',' << format_double(r.rot_noise) << ','
        << format_double(r.outlier_frac) << ',' << r.method << ',' << r.i << ',' << r.j
        << ',' << r.num_inliers << ',' << r.num_outliers << ',' << format_double(r.gamma.x())
        << ',' << format_double(r.gamma.y()) << ',' << format_double(r.gamma.z()) << ','
        << format_double(r.angular_error) << ',' << format_double(r.condition) << '\n';
  }
}

void write_direction_summary_csv(std::ostream& out, const ExperimentSpec& spec,
                                 const DirectionsResult& result) {
  write_metadata(out, spec);
  out << "rot_noise,outlier_frac,method,num_pairs,skipped_pairs,median_rad,p90_rad";
  for (int b = 0; b < kHistogramBins; ++b) out << ",bin_" << b;
  out << '\n';
  for (const auto& s : result.summaries) {
    out << format_double(s.rot_noise) << ',' << format_double(s.outlier_frac) << ','
        << s.method << ',' << s.num_pairs << ',' << s.skipped_pairs << ','
        << format_double(s.median) << ',' << format_double(s.p90);
    for (int c : s.histogram) out << ',' << c;
    out << '\n';
  }
}

}  // namespace lud

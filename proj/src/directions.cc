#include "lud/directions.h"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include "lud/error.h"
#include "lud/random.h"

namespace lud {
namespace {

constexpr int kSceneAttempts = 10;
constexpr double kParallelRayTolerance = 1e-12;

void check_pair(std::size_t num_cameras, int i, int j) {
  const int n = static_cast<int>(num_cameras);
  if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
    throw Error(ErrorCode::kInvalidArgument,
                "camera pair (" + std::to_string(i) + ", " + std::to_string(j) +
                    ") is not a pair of distinct cameras");
  }
}

// World direction of the viewing ray through image point q.
Eigen::Vector3d viewing_ray(const CameraModel& camera, const Eigen::Vector2d& q) {
  const Eigen::Vector3d eta(q.x() / camera.focal_length, q.y() / camera.focal_length, 1.0);
  return camera.rotation * eta;
}

// Calls fn(obs_i, obs_j) for every point seen by both cameras.
template <typename Fn>
void for_common_points(const std::vector<Observation>& a,
                       const std::vector<Observation>& b, Fn fn) {
  std::size_t x = 0, y = 0;
  while (x < a.size() && y < b.size()) {
    if (a[x].point < b[y].point) {
      ++x;
    } else if (b[y].point < a[x].point) {
      ++y;
    } else {
      fn(a[x], b[y]);
      ++x;
      ++y;
    }
  }
}

std::vector<Eigen::Vector3d> nonzero_samples(const SubspaceSampleSet& set) {
  std::vector<Eigen::Vector3d> out;
  for (const auto& v : set.samples) {
    if (!v.isZero(0.0)) out.push_back(v);
  }
  if (out.empty()) {
    throw Error(ErrorCode::kEstimation, "all subspace samples are zero");
  }
  if (out.size() < 2) {
    throw Error(ErrorCode::kInsufficientSamples,
                "line estimation needs at least 2 nonzero samples");
  }
  return out;
}

struct SmallestEigen {
  Eigen::Vector3d vector;
  double condition = 0.0;
};

SmallestEigen smallest_eigenvector(const Eigen::Matrix3d& scatter) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(scatter);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kEstimation, "3x3 eigen-decomposition failed");
  }
  const Eigen::Vector3d lambda = eig.eigenvalues().cwiseMax(0.0);
  SmallestEigen out;
  out.vector = eig.eigenvectors().col(0).normalized();
  // A round-off level middle eigenvalue means a rank-1 scatter: no line.
  out.condition = lambda[1] > 1e-12 * lambda[2] ? lambda[0] / lambda[1] : 1.0;
  return out;
}

// Lexicographically largest of {v, -v}.
Eigen::Vector3d canonical_sign(Eigen::Vector3d v) {
  for (int k = 0; k < 3; ++k) {
    if (v[k] != 0.0) return v[k] > 0.0 ? v : Eigen::Vector3d(-v);
  }
  return v;
}

double robust_objective(const std::vector<Eigen::Vector3d>& samples,
                        const Eigen::Vector3d& gamma, double delta) {
  double f = 0.0;
  for (const auto& v : samples) {
    const double r = gamma.dot(v);
    f += std::sqrt(r * r + delta);
  }
  return f;
}

}  // namespace

void check_camera(const CameraModel& camera) {
  const Eigen::Matrix3d& r = camera.rotation;
  if (!r.allFinite() || !camera.location.allFinite() ||
      (r.transpose() * r - Eigen::Matrix3d::Identity()).norm() > 1e-10 ||
      !(r.determinant() > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "camera rotation is not a rotation matrix");
  }
  if (!(camera.focal_length > 0.0) || !std::isfinite(camera.focal_length)) {
    throw Error(ErrorCode::kInvalidArgument, "focal length must be positive");
  }
}

std::optional<Eigen::Vector2d> project(const CameraModel& camera,
                                       const Eigen::Vector3d& point) {
  const Eigen::Vector3d p = camera.rotation.transpose() * (point - camera.location);
  if (!(p.z() > 0.0)) return std::nullopt;
  return Eigen::Vector2d(camera.focal_length * p.x() / p.z(),
                         camera.focal_length * p.y() / p.z());
}

Scene synth_scene(int num_cameras, int num_points, std::uint64_t seed) {
  if (num_cameras < 2 || num_points < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least 2 cameras and 2 points");
  }
  const Eigen::Vector3d up = Eigen::Vector3d::UnitZ();
  const double sector = 2.0 * std::numbers::pi / num_cameras;
  for (int attempt = 0; attempt < kSceneAttempts; ++attempt) {
    Rng rng(derive_seed(seed, Stream::kScene, {static_cast<std::uint64_t>(attempt)}));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    Scene scene;
    for (int k = 0; k < num_cameras; ++k) {
      const double angle = sector * (k + 0.5 * (unit(rng) - 0.5));
      const double radius = 4.0 + 2.0 * unit(rng);
      CameraModel cam;
      cam.location = Eigen::Vector3d(radius * std::cos(angle), radius * std::sin(angle),
                                     normal(rng));
      const Eigen::Vector3d target(0.5 * normal(rng), 0.5 * normal(rng), 0.5 * normal(rng));
      const Eigen::Vector3d z = (target - cam.location).normalized();
      const Eigen::Vector3d x = z.cross(up).normalized();
      cam.rotation.col(0) = x;
      cam.rotation.col(1) = z.cross(x);
      cam.rotation.col(2) = z;
      cam.focal_length = 500.0 + 1000.0 * unit(rng);
      scene.cameras.push_back(cam);
    }
    for (int k = 0; k < num_points; ++k) {
      scene.points.emplace_back(normal(rng), normal(rng), normal(rng));
    }

    bool ok = true;
    scene.observations.resize(num_cameras);
    for (int c = 0; c < num_cameras; ++c) {
      for (int k = 0; k < num_points; ++k) {
        if (auto q = project(scene.cameras[c], scene.points[k])) {
          scene.observations[c].push_back({k, *q});
        }
      }
      ok = ok && scene.observations[c].size() >= 2;
    }
    if (ok) return scene;
  }
  throw Error(ErrorCode::kSceneGeneration,
              "no scene with every camera seeing 2 points after " +
                  std::to_string(kSceneAttempts) + " attempts");
}

std::vector<CameraModel> perturb_rotations(const std::vector<CameraModel>& cameras,
                                           double angle, std::uint64_t seed) {
  if (!std::isfinite(angle)) {
    throw Error(ErrorCode::kInvalidArgument, "rotation noise must be finite");
  }
  std::vector<CameraModel> out = cameras;
  if (angle == 0.0) return out;
  for (std::size_t c = 0; c < out.size(); ++c) {
    Rng rng(derive_seed(seed, Stream::kNoise, {c}));
    const Eigen::Vector3d axis = uniform_unit_vector(rng, 3);
    out[c].rotation = out[c].rotation * Eigen::AngleAxisd(angle, axis).toRotationMatrix();
  }
  return out;
}

int SubspaceSampleSet::num_nonzero() const {
  int count = 0;
  for (const auto& v : samples) count += v.isZero(0.0) ? 0 : 1;
  return count;
}

SubspaceSampleSet build_nu_samples(const std::vector<CameraModel>& cameras,
                                   const std::vector<std::vector<Observation>>& observations,
                                   int i, int j) {
  check_pair(cameras.size(), i, j);
  if (observations.size() != cameras.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one observation list per camera expected");
  }
  SubspaceSampleSet set;
  set.i = i;
  set.j = j;
  for_common_points(observations[i], observations[j],
                    [&](const Observation& oi, const Observation& oj) {
                      const Eigen::Vector3d a = viewing_ray(cameras[i], oi.image);
                      const Eigen::Vector3d b = viewing_ray(cameras[j], oj.image);
                      const Eigen::Vector3d c = a.cross(b);
                      const double norm = c.norm();
                      if (norm <= kParallelRayTolerance * a.norm() * b.norm()) {
                        set.samples.push_back(Eigen::Vector3d::Zero());
                      } else {
                        set.samples.push_back(c / norm);
                      }
                    });
  if (set.num_nonzero() < 2) {
    throw Error(ErrorCode::kInsufficientSamples,
                "pair (" + std::to_string(i) + ", " + std::to_string(j) + ") has " +
                    std::to_string(set.num_nonzero()) + " nonzero samples, need 2");
  }
  return set;
}

void inject_outlier_samples(SubspaceSampleSet* set, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "outlier fraction must be in [0, 1)");
  }
  const double m = static_cast<double>(set->samples.size());
  const long k = std::lround(fraction * m / (1.0 - fraction));
  Rng rng(derive_seed(seed, Stream::kOutliers));
  for (long s = 0; s < k; ++s) {
    set->samples.push_back(Eigen::Vector3d(uniform_unit_vector(rng, 3)));
  }
}

LineEstimate estimate_line_pca(const SubspaceSampleSet& set) {
  const auto samples = nonzero_samples(set);
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (const auto& v : samples) scatter += v * v.transpose();
  const SmallestEigen eig = smallest_eigenvector(scatter);
  LineEstimate out;
  out.line = canonical_sign(eig.vector);
  out.condition = eig.condition;
  return out;
}

LineEstimate estimate_line_robust(const SubspaceSampleSet& set, const LineOptions& options) {
  if (!(options.delta > 0.0) || !(options.tol > 0.0) || options.max_iters < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "line estimation needs delta > 0, tol > 0 and max_iters >= 1");
  }
  const auto samples = nonzero_samples(set);
  LineEstimate out = estimate_line_pca(set);
  Eigen::Vector3d gamma = out.line;
  out.objective_trace.push_back(robust_objective(samples, gamma, options.delta));

  for (int it = 1; it <= options.max_iters; ++it) {
    Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
    for (const auto& v : samples) {
      const double r = gamma.dot(v);
      scatter += (1.0 / std::sqrt(r * r + options.delta)) * (v * v.transpose());
    }
    const SmallestEigen eig = smallest_eigenvector(scatter);
    Eigen::Vector3d next = eig.vector;
    if (next.dot(gamma) < 0.0) next = -next;
    const double change = 2.0 * std::atan2((next - gamma).norm(), (next + gamma).norm());
    gamma = next;
    out.condition = eig.condition;
    out.iterations = it;
    out.objective_trace.push_back(robust_objective(samples, gamma, options.delta));
    if (change < options.tol) break;
  }
  out.line = canonical_sign(gamma);
  return out;
}

SignVote disambiguate_sign(const Eigen::Vector3d& line,
                           const std::vector<CameraModel>& cameras,
                           const std::vector<std::vector<Observation>>& observations,
                           int i, int j) {
  check_pair(cameras.size(), i, j);
  if (observations.size() != cameras.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one observation list per camera expected");
  }
  if (std::abs(line.norm() - 1.0) > 1e-12) {
    throw Error(ErrorCode::kContractViolation, "line must be a unit vector");
  }
  const CameraModel& ci = cameras[i];
  const CameraModel& cj = cameras[j];
  SignVote vote;
  int triangulable = 0;
  for_common_points(observations[i], observations[j],
                    [&](const Observation& oi, const Observation& oj) {
                      const Eigen::Vector3d a = viewing_ray(ci, oi.image);
                      const Eigen::Vector3d b = viewing_ray(cj, oj.image);
                      const double aa = a.dot(a), bb = b.dot(b), ab = a.dot(b);
                      const double det = aa * bb - ab * ab;
                      if (!(det > kParallelRayTolerance * aa * bb)) return;
                      ++triangulable;
                      // Camera j at the origin, camera i at sign * line.
                      for (int sign : {1, -1}) {
                        const Eigen::Vector3d center = sign * line;
                        const double ac = a.dot(center), bc = b.dot(center);
                        const double li = (-bb * ac + ab * bc) / det;
                        const double lj = (ab * -ac + aa * bc) / det;
                        const Eigen::Vector3d x = 0.5 * (center + li * a + lj * b);
                        const double zi = (ci.rotation.transpose() * (x - center)).z();
                        const double zj = (cj.rotation.transpose() * x).z();
                        if (zi > 0.0 && zj > 0.0) ++(sign > 0 ? vote.votes_plus : vote.votes_minus);
                      }
                    });
  if (triangulable == 0) {
    throw Error(ErrorCode::kSignAmbiguous,
                "pair (" + std::to_string(i) + ", " + std::to_string(j) +
                    ") has no triangulable common point");
  }
  if (vote.votes_plus == vote.votes_minus) {
    vote.sign = 1;
    vote.warning = "cheirality vote tied at " + std::to_string(vote.votes_plus) +
                   "; sign set to +1";
  } else {
    vote.sign = vote.votes_plus > vote.votes_minus ? 1 : -1;
  }
  return vote;
}

}  // namespace lud

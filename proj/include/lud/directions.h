#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace lud {

// A pinhole camera. A world point P has camera coordinates R^T (P - t) and
// image coordinates (f / z) (x, y).
struct CameraModel {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d location = Eigen::Vector3d::Zero();
  double focal_length = 1.0;
};

// Throws kInvalidArgument unless R is a rotation (|R^T R - I| <= 1e-10,
// det R > 0) and f > 0.
void check_camera(const CameraModel& camera);

// Image coordinates of P, or nullopt when P is not strictly in front.
std::optional<Eigen::Vector2d> project(const CameraModel& camera,
                                       const Eigen::Vector3d& point);

struct Observation {
  int point = 0;
  Eigen::Vector2d image;
};

struct Scene {
  std::vector<CameraModel> cameras;
  std::vector<Eigen::Vector3d> points;
  // Per camera, the visible points sorted by point index.
  std::vector<std::vector<Observation>> observations;
};

// Cameras on a jittered horizontal ring of radius 4..6 around the origin,
// each looking at a jittered target near the origin, and a standard normal
// point cloud. A scene in which some camera sees fewer than 2 points is
// redrawn from a fresh sub-seed, up to a fixed number of attempts.
Scene synth_scene(int num_cameras, int num_points, std::uint64_t seed);

// Right-multiplies every rotation by a rotation of exactly `angle` radians
// about a uniformly random axis.
std::vector<CameraModel> perturb_rotations(const std::vector<CameraModel>& cameras,
                                           double angle, std::uint64_t seed);

// Unit vectors nominally orthogonal to t_i - t_j. Zero entries stand for
// degenerate (parallel-ray) samples and are ignored by the estimators.
struct SubspaceSampleSet {
  int i = 0;
  int j = 0;
  std::vector<Eigen::Vector3d> samples;

  int num_nonzero() const;
};

// One sample per point seen by both cameras: the normalized cross product of
// the two viewing rays R eta, eta = (q / f, 1). Cross products with
// |a x b| <= 1e-12 |a| |b| are stored as zero.
SubspaceSampleSet build_nu_samples(const std::vector<CameraModel>& cameras,
                                   const std::vector<std::vector<Observation>>& observations,
                                   int i, int j);

// Appends round(fraction * m / (1 - fraction)) uniform unit vectors, m the
// current number of samples, so that `fraction` of the result is outliers.
void inject_outlier_samples(SubspaceSampleSet* set, double fraction,
                            std::uint64_t seed);

struct LineOptions {
  double delta = 1e-12;
  // Stop when the angle between successive iterates is below tol.
  double tol = 1e-12;
  int max_iters = 200;
};

struct LineEstimate {
  // Unit vector spanning the estimated line, first nonzero coordinate > 0.
  Eigen::Vector3d line;
  // lambda_min / lambda_mid of the final (weighted) scatter matrix. Near 0
  // the line is well determined; near 1 it is not.
  double condition = 0.0;
  int iterations = 0;
  // Sum sqrt((gamma^T nu)^2 + delta) per iterate, starting from the PCA line.
  std::vector<double> objective_trace;
};

// Robust line fit: minimizes sum |gamma^T nu_k| over unit gamma by
// reweighted smallest eigenvectors, starting from the PCA line.
LineEstimate estimate_line_robust(const SubspaceSampleSet& set,
                                  const LineOptions& options = {});

// Smallest eigenvector of sum nu_k nu_k^T.
LineEstimate estimate_line_pca(const SubspaceSampleSet& set);

struct SignVote {
  int sign = 1;
  int votes_plus = 0;
  int votes_minus = 0;
  // Set on a tie, which resolves to +1.
  std::optional<std::string> warning;
};

// Chooses b in {-1, +1} so that t_i - t_j is along b * line. For each sign
// the common points are triangulated by the midpoint of the two rays with a
// unit baseline, and the sign under which more points lie in front of both
// cameras wins.
SignVote disambiguate_sign(const Eigen::Vector3d& line,
                           const std::vector<CameraModel>& cameras,
                           const std::vector<std::vector<Observation>>& observations,
                           int i, int j);

}  // namespace lud

#include "lud/eval.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lud/error.h"

namespace lud {
namespace {

void check_compatible(const LocationSet& a, const LocationSet& b) {
  if (a.size() != b.size() || a.dimension() != b.dimension()) {
    throw Error(ErrorCode::kInvalidArgument,
                "estimate and truth differ in size or dimension");
  }
}

}  // namespace

AlignmentResult align_scale_translation(const LocationSet& estimates,
                                        const LocationSet& truth) {
  check_compatible(estimates, truth);
  const Eigen::VectorXd est_center = estimates.centroid();
  const Eigen::VectorXd truth_center = truth.centroid();
  const Eigen::MatrixXd est_c = estimates.points().colwise() - est_center;
  const Eigen::MatrixXd truth_c = truth.points().colwise() - truth_center;

  if (truth_c.squaredNorm() == 0.0) {
    throw Error(ErrorCode::kDegenerateTruth, "all truth locations coincide");
  }
  const double est_energy = est_c.squaredNorm();
  if (est_energy == 0.0) {
    throw Error(ErrorCode::kDegenerateEstimate, "all estimates coincide");
  }

  AlignmentResult result;
  result.scale = est_c.cwiseProduct(truth_c).sum() / est_energy;
  if (!(result.scale > 0.0)) {
    // The objective is convex in s with its minimum at s <= 0, so the
    // infimum over s > 0 is approached as s -> 0+.
    result.sign_mismatch = true;
    result.scale = std::numeric_limits<double>::min();
  }
  result.translation = truth_center - result.scale * est_center;
  Eigen::MatrixXd aligned = (result.scale * est_c).colwise() + truth_center;
  result.aligned_estimates = LocationSet(std::move(aligned));
  result.nrmse = nrmse(result.aligned_estimates, truth);
  return result;
}

double nrmse(const LocationSet& aligned, const LocationSet& truth) {
  check_compatible(aligned, truth);
  const Eigen::MatrixXd truth_c = truth.points().colwise() - truth.centroid();
  const double denominator = truth_c.squaredNorm();
  if (denominator == 0.0) {
    throw Error(ErrorCode::kDegenerateTruth, "all truth locations coincide");
  }
  return std::sqrt((aligned.points() - truth.points()).squaredNorm() / denominator);
}

double angular_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
  constexpr double kTol = 1e-9;
  if (estimate.size() != truth.size() ||
      std::abs(estimate.norm() - 1.0) > kTol || std::abs(truth.norm() - 1.0) > kTol) {
    throw Error(ErrorCode::kContractViolation,
                "angular_error expects two unit vectors of equal dimension");
  }
  // Same value as acos(clamp(a.b)) for unit vectors, without the loss of
  // resolution acos has near 0 and pi.
  return 2.0 * std::atan2((estimate - truth).norm(), (estimate + truth).norm());
}

}  // namespace lud

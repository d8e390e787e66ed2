#pragma once

#include <Eigen/Core>

#include "lud/formation.h"

namespace lud {

struct AlignmentResult {
  double scale = 1.0;
  // aligned_i = scale * estimate_i + translation
  Eigen::VectorXd translation;
  LocationSet aligned_estimates;
  double nrmse = 0.0;
  // The unconstrained least-squares scale was <= 0 and got clamped.
  bool sign_mismatch = false;
};

// Removes global scale and translation: both sets are centered and the
// estimate is scaled by the least-squares optimal s > 0. No rotation.
AlignmentResult align_scale_translation(const LocationSet& estimates,
                                        const LocationSet& truth);

// sqrt(sum |t_hat_i - t_i|^2 / sum |t_i - t_0|^2), t_0 the centroid of truth.
double nrmse(const LocationSet& aligned, const LocationSet& truth);

// Angle in [0, pi] between two unit vectors.
double angular_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth);

}  // namespace lud

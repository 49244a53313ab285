#pragma once

#include <Eigen/Core>

#include "plantdoctor/image.hpp"

namespace plantdoctor {

// Constant-velocity box filter in (cx, cy, aspect, height) space. Process and
// measurement noise scale with the current box height so behaviour is
// independent of image resolution.

using StateVector = Eigen::Matrix<double, 8, 1>;
using StateCovariance = Eigen::Matrix<double, 8, 8>;
using Measurement = Eigen::Matrix<double, 4, 1>;
using MeasurementCovariance = Eigen::Matrix<double, 4, 4>;

struct KalmanState {
    StateVector mean = StateVector::Zero();
    StateCovariance covariance = StateCovariance::Identity();
};

struct MeasurementDistribution {
    Measurement mean;
    MeasurementCovariance covariance;
};

namespace kalman {

inline constexpr double kPositionStdWeight = 1.0 / 20.0;
inline constexpr double kVelocityStdWeight = 1.0 / 160.0;
inline constexpr double kMinHeight = 1e-3;
inline constexpr double kMinAspect = 1e-6;

}  // namespace kalman

[[nodiscard]] Measurement to_measurement(const BoundingBox& box);
[[nodiscard]] BoundingBox to_box(const StateVector& mean);
[[nodiscard]] BoundingBox to_box(const Measurement& z);

/// Fresh state at `z` with zero velocity and wide velocity uncertainty.
[[nodiscard]] KalmanState kalman_initiate(const Measurement& z);

[[nodiscard]] KalmanState kalman_predict(const KalmanState& state);

/// Posterior after observing `z`. Throws NumericError when the innovation
/// covariance is not positive definite or the state is not finite.
[[nodiscard]] KalmanState kalman_update(const KalmanState& state, const Measurement& z);

/// Predicted measurement distribution H x, H P H^T + R.
[[nodiscard]] MeasurementDistribution kalman_project(const KalmanState& state);

/// Squared Mahalanobis distance of `z` under the projected distribution.
[[nodiscard]] double gating_distance(const KalmanState& state, const Measurement& z);

/// (x - mean)^T cov^-1 (x - mean); throws NumericError on a singular covariance.
[[nodiscard]] double mahalanobis_squared(const Measurement& mean, const MeasurementCovariance& cov, const Measurement& x);

}  // namespace plantdoctor

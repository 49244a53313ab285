#include "plantdoctor/kalman.hpp"

#include <algorithm>

#include <Eigen/Cholesky>

#include "plantdoctor/errors.hpp"

namespace plantdoctor {

namespace {

using MeasurementMatrix = Eigen::Matrix<double, 4, 8>;

StateCovariance transition() {
    StateCovariance f = StateCovariance::Identity();
    for (int i = 0; i < 4; ++i) {
        f(i, i + 4) = 1.0;
    }
    return f;
}

MeasurementMatrix observation() {
    MeasurementMatrix h = MeasurementMatrix::Zero();
    for (int i = 0; i < 4; ++i) {
        h(i, i) = 1.0;
    }
    return h;
}

void require_finite(const KalmanState& s) {
    if (!s.mean.allFinite() || !s.covariance.allFinite()) {
        throw NumericError("non-finite Kalman state");
    }
}

template <typename M>
M symmetrized(const M& m) {
    return (m + m.transpose()) * 0.5;
}

}  // namespace

Measurement to_measurement(const BoundingBox& box) {
    Measurement z;
    z << box.center_x(), box.center_y(), box.width / box.height, box.height;
    return z;
}

BoundingBox to_box(const Measurement& z) {
    const double h = z(3);
    const double w = z(2) * h;
    return {z(0) - w / 2.0, z(1) - h / 2.0, w, h};
}

BoundingBox to_box(const StateVector& mean) {
    return to_box(Measurement(mean.head<4>()));
}

KalmanState kalman_initiate(const Measurement& z) {
    if (!z.allFinite() || z(3) <= 0.0) {
        throw NumericError("invalid initial measurement");
    }
    KalmanState s;
    s.mean.head<4>() = z;
    s.mean.tail<4>().setZero();
    const double h = z(3);
    const double p = 2.0 * kalman::kPositionStdWeight * h;
    const double v = 10.0 * kalman::kVelocityStdWeight * h;
    StateVector std_dev;
    std_dev << p, p, 1e-2, p, v, v, 1e-5, v;
    s.covariance = std_dev.array().square().matrix().asDiagonal();
    return s;
}

KalmanState kalman_predict(const KalmanState& state) {
    require_finite(state);
    static const StateCovariance f = transition();
    const double h = state.mean(3);
    const double p = kalman::kPositionStdWeight * h;
    const double v = kalman::kVelocityStdWeight * h;
    StateVector std_dev;
    std_dev << p, p, 1e-2, p, v, v, 1e-5, v;
    const StateCovariance q = std_dev.array().square().matrix().asDiagonal();

    KalmanState out;
    out.mean = f * state.mean;
    out.covariance = symmetrized(StateCovariance(f * state.covariance * f.transpose() + q));
    return out;
}

MeasurementDistribution kalman_project(const KalmanState& state) {
    require_finite(state);
    static const MeasurementMatrix hm = observation();
    const double h = state.mean(3);
    const double p = kalman::kPositionStdWeight * h;
    Measurement std_dev;
    std_dev << p, p, 1e-1, p;
    const MeasurementCovariance r = std_dev.array().square().matrix().asDiagonal();
    return {hm * state.mean, symmetrized(MeasurementCovariance(hm * state.covariance * hm.transpose() + r))};
}

KalmanState kalman_update(const KalmanState& state, const Measurement& z) {
    if (!z.allFinite() || z(3) <= 0.0) {
        throw NumericError("invalid measurement");
    }
    static const MeasurementMatrix hm = observation();
    const MeasurementDistribution proj = kalman_project(state);
    const Eigen::LLT<MeasurementCovariance> llt(proj.covariance);
    if (llt.info() != Eigen::Success) {
        throw NumericError("innovation covariance is not positive definite");
    }
    // K = P H^T S^-1, computed as (S^-1 H P)^T.
    const Eigen::Matrix<double, 8, 4> gain = llt.solve(hm * state.covariance).transpose();
    KalmanState out;
    out.mean = state.mean + gain * (z - proj.mean);
    out.covariance = symmetrized(StateCovariance(state.covariance - gain * proj.covariance * gain.transpose()));
    out.mean(2) = std::max(out.mean(2), kalman::kMinAspect);
    out.mean(3) = std::max(out.mean(3), kalman::kMinHeight);
    require_finite(out);
    return out;
}

double mahalanobis_squared(const Measurement& mean, const MeasurementCovariance& cov, const Measurement& x) {
    const Eigen::LLT<MeasurementCovariance> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw NumericError("projected covariance is not positive definite");
    }
    const Measurement d = x - mean;
    const Measurement w = llt.matrixL().solve(d);
    return w.squaredNorm();
}

double gating_distance(const KalmanState& state, const Measurement& z) {
    const MeasurementDistribution proj = kalman_project(state);
    return mahalanobis_squared(proj.mean, proj.covariance, z);
}

}  // namespace plantdoctor

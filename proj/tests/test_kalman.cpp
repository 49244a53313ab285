#include <doctest.h>

#include <cmath>

#include "plantdoctor/errors.hpp"
#include "plantdoctor/kalman.hpp"

using namespace plantdoctor;

namespace {

KalmanState started(double cx, double cy, double a, double h) {
    Measurement z;
    z << cx, cy, a, h;
    return kalman_initiate(z);
}

double asymmetry(const StateCovariance& p) { return (p - p.transpose()).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("box and measurement conversions round trip") {
    const BoundingBox box{10, 20, 30, 60};
    const Measurement z = to_measurement(box);
    CHECK(z(0) == 25.0);
    CHECK(z(1) == 50.0);
    CHECK(z(2) == 0.5);
    CHECK(z(3) == 60.0);
    const BoundingBox back = to_box(z);
    CHECK(back.x == doctest::Approx(10));
    CHECK(back.width == doctest::Approx(30));
}

TEST_CASE("predict propagates position by velocity") {
    KalmanState s = started(100, 50, 0.5, 40);
    const StateVector before = s.mean;
    KalmanState p = kalman_predict(s);
    CHECK(p.mean.head<4>().isApprox(before.head<4>()));  // zero initial velocity
    CHECK(p.covariance.trace() > s.covariance.trace());
    CHECK(asymmetry(p.covariance) < 1e-9);

    s.mean(4) = 5.0;
    p = kalman_predict(s);
    CHECK(p.mean(0) == doctest::Approx(105.0));
}

TEST_CASE("update with the predicted measurement keeps the mean") {
    KalmanState s = kalman_predict(started(100, 50, 0.5, 40));
    const Measurement predicted = kalman_project(s).mean;
    const KalmanState u = kalman_update(s, predicted);
    CHECK((u.mean - s.mean).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(u.covariance(0, 0) < s.covariance(0, 0));
    CHECK(u.covariance(1, 1) < s.covariance(1, 1));
    CHECK(asymmetry(u.covariance) < 1e-9);
    for (int i = 0; i < 8; ++i) {
        CHECK(u.covariance(i, i) >= 0.0);
    }
}

TEST_CASE("repeated updates converge to a fixed measurement") {
    KalmanState s = started(0, 0, 1.0, 50);
    Measurement target;
    target << 30, -20, 1.0, 50;
    // The velocity states make the approach oscillate at first, so only the
    // envelope is checked.
    double err = 0.0;
    for (int i = 0; i < 50; ++i) {
        s = kalman_update(kalman_predict(s), target);
        err = std::hypot(s.mean(0) - 30.0, s.mean(1) + 20.0);
        CHECK(err < 2.0 * std::hypot(30.0, 20.0));
    }
    CHECK(err < 0.5);
    CHECK(std::abs(s.mean(4)) < 0.1);
    CHECK(std::abs(s.mean(5)) < 0.1);
}

TEST_CASE("constant-velocity target is tracked exactly after burn-in") {
    KalmanState s = started(10, 10, 0.8, 40);
    double max_late_error = 0.0;
    for (int t = 1; t <= 80; ++t) {
        s = kalman_predict(s);
        Measurement z;
        z << 10 + 3.0 * t, 10 - 1.5 * t, 0.8, 40;
        if (t > 60) {
            max_late_error = std::max(max_late_error, std::hypot(s.mean(0) - z(0), s.mean(1) - z(1)));
        }
        s = kalman_update(s, z);
    }
    CHECK(max_late_error < 1e-3);
}

TEST_CASE("gating distance: zero at the prediction, translation invariant") {
    KalmanState s = kalman_predict(started(100, 80, 0.6, 30));
    const Measurement pred = kalman_project(s).mean;
    CHECK(gating_distance(s, pred) == doctest::Approx(0.0));

    Measurement z = pred;
    z(0) += 4.0;
    z(1) -= 2.0;
    const double d = gating_distance(s, z);
    CHECK(d > 0.0);
    KalmanState shifted = s;
    shifted.mean(0) += 250.0;
    shifted.mean(1) -= 75.0;
    z(0) += 250.0;
    z(1) -= 75.0;
    CHECK(gating_distance(shifted, z) == doctest::Approx(d).epsilon(1e-12));
}

TEST_CASE("mahalanobis quadratic form by hand") {
    Measurement mean = Measurement::Zero();
    Measurement x;
    x << 1, 1, 0, 0;
    CHECK(mahalanobis_squared(mean, MeasurementCovariance::Identity(), x) == doctest::Approx(2.0));
    MeasurementCovariance diag = MeasurementCovariance::Identity();
    diag(0, 0) = 4.0;
    CHECK(mahalanobis_squared(mean, diag, x) == doctest::Approx(1.25));
    CHECK_THROWS_AS((void)mahalanobis_squared(mean, MeasurementCovariance::Zero(), x), NumericError);
}

TEST_CASE("degenerate covariance is reported as a numeric failure") {
    KalmanState s = started(0, 0, 1, 10);
    s.covariance.setZero();
    s.mean(3) = 0.0;
    Measurement z;
    z << 1, 1, 1, 10;
    CHECK_THROWS_AS((void)kalman_update(s, z), NumericError);
}

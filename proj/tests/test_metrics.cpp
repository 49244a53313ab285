#include <doctest.h>

#include <cmath>

#include "plantdoctor/errors.hpp"
#include "plantdoctor/metrics.hpp"
#include "support/generators.hpp"

using namespace plantdoctor;
using namespace plantdoctor::metrics;

namespace {

GrayImage constant(int w, int h, double v) { return GrayImage(w, h, v); }

GrayImage checkerboard(int w, int h) {
    GrayImage g(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            g.at(x, y) = ((x + y) % 2 == 0) ? 0.0 : 255.0;
        }
    }
    return g;
}

// Direct transcription of the definition, used as an independent reference.
double reference_laplacian_variance(const GrayImage& g) {
    std::vector<double> r;
    for (int y = 1; y + 1 < g.height; ++y) {
        for (int x = 1; x + 1 < g.width; ++x) {
            r.push_back(g.at(x - 1, y) + g.at(x + 1, y) + g.at(x, y - 1) + g.at(x, y + 1) - 4.0 * g.at(x, y));
        }
    }
    double mean = 0.0;
    for (double v : r) {
        mean += v;
    }
    mean /= static_cast<double>(r.size());
    double var = 0.0;
    for (double v : r) {
        var += (v - mean) * (v - mean);
    }
    return var / static_cast<double>(r.size());
}

}  // namespace

TEST_CASE("laplacian variance vanishes on constant and affine images") {
    CHECK(laplacian_variance(constant(9, 7, 42.0)) == doctest::Approx(0.0));
    GrayImage ramp(12, 10);
    for (int y = 0; y < ramp.height; ++y) {
        for (int x = 0; x < ramp.width; ++x) {
            ramp.at(x, y) = x;
        }
    }
    CHECK(laplacian_variance(ramp) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("laplacian variance of a 0/255 checkerboard") {
    // Responses are +-1020. With an even interior they balance exactly.
    CHECK(laplacian_variance(checkerboard(8, 8)) == doctest::Approx(1040400.0));
    // 13x7 interior: 46 of one sign, 45 of the other, mean 1020/91.
    const double m = 1.0 / 91.0;
    CHECK(laplacian_variance(checkerboard(15, 9)) == doctest::Approx(1040400.0 * (1.0 - m * m)));
}

TEST_CASE("laplacian variance rejects images smaller than the kernel") {
    CHECK_THROWS_AS((void)laplacian_variance(constant(2, 5, 1.0)), InvalidArgument);
    CHECK_THROWS_AS((void)laplacian_variance(constant(5, 2, 1.0)), InvalidArgument);
}

TEST_CASE("laplacian variance matches the reference and ignores constant offsets") {
    testgen::Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        GrayImage g = testgen::random_gray(rng, rng.uniform_int(3, 30), rng.uniform_int(3, 30));
        const double v = laplacian_variance(g);
        CHECK(v == doctest::Approx(reference_laplacian_variance(g)).epsilon(1e-9));
        const double c = rng.uniform(-50.0, 50.0);
        for (double& p : g.pixels) {
            p += c;
        }
        CHECK(laplacian_variance(g) == doctest::Approx(v).epsilon(1e-9));
    }
}

TEST_CASE("ssim self-identity and constant-image closed form") {
    testgen::Rng rng(5);
    const GrayImage x = testgen::random_gray(rng, 32, 24);
    CHECK(std::abs(ssim(x, x) - 1.0) < 1e-9);

    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double expected = (2.0 * 100.0 * 200.0 + c1) / (100.0 * 100.0 + 200.0 * 200.0 + c1);
    CHECK(std::abs(ssim(constant(20, 20, 100.0), constant(20, 20, 200.0)) - expected) < 1e-6);
    CHECK(expected == doctest::Approx(0.80003).epsilon(1e-5));
}

TEST_CASE("ssim is symmetric") {
    testgen::Rng rng(7);
    for (int i = 0; i < 20; ++i) {
        const int w = rng.uniform_int(11, 30);
        const int h = rng.uniform_int(11, 30);
        const GrayImage a = testgen::random_gray(rng, w, h);
        const GrayImage b = testgen::random_gray(rng, w, h);
        CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
    }
}

TEST_CASE("ssim rejects mismatched or undersized inputs") {
    CHECK_THROWS_AS((void)ssim(constant(12, 12, 1), constant(13, 12, 1)), InvalidArgument);
    CHECK_THROWS_AS((void)ssim(constant(10, 12, 1), constant(10, 12, 1)), InvalidArgument);
}

TEST_CASE("ssim decreases strictly as noise grows") {
    const GrayImage base = testgen::texture(64, 64);
    double previous = 1.0;
    for (double sigma : {5.0, 10.0, 20.0, 40.0}) {
        testgen::Rng rng(11);
        const double s = ssim(base, testgen::add_noise(rng, base, sigma));
        CHECK(s < previous);
        previous = s;
    }
}

TEST_CASE("cached ssim reference agrees with the direct computation") {
    testgen::Rng rng(13);
    const GrayImage a = testgen::random_gray(rng, 25, 19);
    const GrayImage b = testgen::random_gray(rng, 25, 19);
    const SsimReference ra(a);
    const SsimReference rb(b);
    CHECK(ra.compare(rb) == doctest::Approx(ssim(a, b)).epsilon(1e-12));
}

TEST_CASE("mask iou and dice examples") {
    BinaryMask full(4, 4, true);
    BinaryMask left(4, 4);
    for (int y = 0; y < 4; ++y) {
        left.at(0, y) = left.at(1, y) = 1;
    }
    CHECK(mask_iou(left, full) == doctest::Approx(0.5));
    CHECK(mask_iou(full, full) == 1.0);
    CHECK(dice(full, full) == 1.0);
    CHECK(dice_loss(full, full) == 0.0);

    BinaryMask right(4, 4);
    for (int y = 0; y < 4; ++y) {
        right.at(3, y) = 1;
    }
    CHECK(mask_iou(left, right) == 0.0);
    CHECK(dice(left, right) == 0.0);
    CHECK(dice_loss(left, right) == 1.0);

    const BinaryMask none(4, 4);
    CHECK(mask_iou(none, none) == 1.0);
    CHECK(dice(none, none) == 1.0);
    CHECK_THROWS_AS((void)mask_iou(none, BinaryMask(3, 4)), InvalidArgument);
    CHECK_THROWS_AS((void)dice(none, BinaryMask(4, 5)), InvalidArgument);
}

TEST_CASE("dice equals 2 iou / (1 + iou) on random masks, both symmetric") {
    testgen::Rng rng(17);
    for (int i = 0; i < 1000; ++i) {
        const int w = rng.uniform_int(1, 64);
        const int h = rng.uniform_int(1, 64);
        const double pa = rng.uniform(0.0, 1.0);
        const double pb = rng.uniform(0.0, 1.0);
        const BinaryMask a = testgen::random_mask(rng, w, h, pa);
        const BinaryMask b = testgen::random_mask(rng, w, h, pb);
        const double j = mask_iou(a, b);
        CHECK(std::abs(dice(a, b) - 2.0 * j / (1.0 + j)) < 1e-12);
        CHECK(j == mask_iou(b, a));
        CHECK(dice(a, b) == dice(b, a));
    }
}

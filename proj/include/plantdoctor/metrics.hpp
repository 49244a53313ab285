#pragma once

#include "plantdoctor/image.hpp"

namespace plantdoctor::metrics {

/// Variance of the 4-neighbour Laplacian response over interior pixels (no
/// padding). Requires at least 3x3.
[[nodiscard]] double laplacian_variance(const GrayImage& img);

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;
};

/// Mean SSIM over all fully-contained Gaussian windows. Inputs must share
/// dimensions and be at least window x window.
[[nodiscard]] double ssim(const GrayImage& a, const GrayImage& b, const SsimParams& params = {});

/// Precomputed per-image statistics so one image can be compared against many
/// others without refiltering its mean and variance maps.
class SsimReference {
public:
    explicit SsimReference(GrayImage img, const SsimParams& params = {});

    [[nodiscard]] int width() const noexcept { return img_.width; }
    [[nodiscard]] int height() const noexcept { return img_.height; }

    [[nodiscard]] double compare(const SsimReference& other) const;

private:
    GrayImage img_;
    SsimParams params_;
    GrayImage mean_;      // local means, valid region
    GrayImage variance_;  // local variances, valid region
};

/// |a ∩ b| / |a ∪ b|; two empty masks score 1.
[[nodiscard]] double mask_iou(const BinaryMask& a, const BinaryMask& b);
/// 2|a ∩ b| / (|a| + |b|); two empty masks score 1.
[[nodiscard]] double dice(const BinaryMask& a, const BinaryMask& b);
[[nodiscard]] inline double dice_loss(const BinaryMask& a, const BinaryMask& b) { return 1.0 - dice(a, b); }

}  // namespace plantdoctor::metrics

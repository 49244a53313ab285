#pragma once

#include <vector>

#include "plantdoctor/image.hpp"

namespace plantdoctor {

/// Unit-norm appearance descriptor.
using Feature = std::vector<double>;

inline constexpr int kThumbnailSide = 16;
inline constexpr int kHistogramBinsPerChannel = 64;
inline constexpr std::size_t kFeatureLength =
    kThumbnailSide * kThumbnailSide * 3 + kHistogramBinsPerChannel * 3;

/// 16x16 RGB thumbnail and a 64-bin-per-channel colour histogram, each block
/// L2-normalised, concatenated and normalised again. An all-black ROI maps to
/// the uniform unit vector.
[[nodiscard]] Feature appearance_feature(const Image& roi);

/// 1 - <a, b> for unit vectors.
[[nodiscard]] double cosine_distance(const Feature& a, const Feature& b);

}  // namespace plantdoctor

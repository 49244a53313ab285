#include "plantdoctor/appearance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "plantdoctor/errors.hpp"

namespace plantdoctor {

namespace {

void normalize(std::vector<double>::iterator first, std::vector<double>::iterator last) {
    const double norm = std::sqrt(std::inner_product(first, last, first, 0.0));
    if (norm > 0.0) {
        std::for_each(first, last, [norm](double& v) { v /= norm; });
    }
}

}  // namespace

Feature appearance_feature(const Image& roi) {
    if (roi.empty()) {
        throw InvalidArgument("appearance feature of an empty ROI");
    }
    Feature f(kFeatureLength, 0.0);
    const bool all_black =
        std::all_of(roi.pixels.begin(), roi.pixels.end(), [](std::uint8_t v) { return v == 0; });
    if (all_black) {
        std::fill(f.begin(), f.end(), 1.0 / std::sqrt(static_cast<double>(kFeatureLength)));
        return f;
    }

    const Image thumb = resize_bilinear(roi, kThumbnailSide, kThumbnailSide);
    const std::size_t thumb_len = thumb.pixels.size();
    std::transform(thumb.pixels.begin(), thumb.pixels.end(), f.begin(),
                   [](std::uint8_t v) { return v / 255.0; });

    constexpr int bin_width = 256 / kHistogramBinsPerChannel;
    const auto hist = f.begin() + static_cast<std::ptrdiff_t>(thumb_len);
    const std::size_t pixel_count = roi.pixels.size() / 3;
    for (std::size_t i = 0; i < pixel_count; ++i) {
        for (int c = 0; c < 3; ++c) {
            const int bin = roi.pixels[i * 3 + static_cast<std::size_t>(c)] / bin_width;
            hist[c * kHistogramBinsPerChannel + bin] += 1.0;
        }
    }

    normalize(f.begin(), hist);
    normalize(hist, f.end());
    normalize(f.begin(), f.end());
    return f;
}

double cosine_distance(const Feature& a, const Feature& b) {
    if (a.size() != b.size()) {
        throw InvalidArgument("feature length mismatch");
    }
    return 1.0 - std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace plantdoctor

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "plantdoctor/image.hpp"
#include "plantdoctor/tracker.hpp"

namespace plantdoctor {

enum class MaskClass { leaf, damage };

/// Where an ROI came from. Model backends ignore it; the synthetic oracle uses
/// it to look up ground truth.
struct RoiContext {
    std::size_t frame_index = 0;
    std::size_t source_index = 0;
    PixelRect region;
    int frame_width = 0;
    int frame_height = 0;
};

/// Per-pixel class probability in [0, 1], row-major.
struct ProbabilityMap {
    int width = 0;
    int height = 0;
    std::vector<float> values;
};

/// Implementations must tolerate concurrent calls on distinct inputs and throw
/// BackendError on failure.
class SegmenterBackend {
public:
    virtual ~SegmenterBackend() = default;

    [[nodiscard]] virtual ProbabilityMap predict(const Image& roi, const RoiContext& ctx, MaskClass cls) const = 0;
};

struct SegmenterConfig {
    double binarization_threshold = 0.5;

    void validate() const;
};

/// 5x5 Gaussian (sigma 1) per channel, reflect-101 borders.
[[nodiscard]] Image gaussian_blur_5x5(const Image& img, double sigma = 1.0);

/// Histogram-equalises luma (full-range YCbCr) and recombines it with the
/// original chroma. A single-level image is returned unchanged.
[[nodiscard]] Image equalize_luminance(const Image& img);

/// Blur then luminance equalisation; output keeps the input dimensions.
[[nodiscard]] Image preprocess(const Image& roi);

/// Pixels with probability >= threshold.
[[nodiscard]] BinaryMask binarize(const ProbabilityMap& probs, double threshold);

/// Largest 4-connected component; the earliest in raster order wins ties.
[[nodiscard]] BinaryMask largest_component(const BinaryMask& mask);

class Segmenter {
public:
    Segmenter(std::shared_ptr<const SegmenterBackend> backend, SegmenterConfig config = {});

    /// Pass 1: leaf area, reduced to its largest connected component.
    [[nodiscard]] BinaryMask segment_leaf(const Image& roi, const RoiContext& ctx) const;
    /// Pass 2: damaged area, unfiltered.
    [[nodiscard]] BinaryMask segment_damage(const Image& roi, const RoiContext& ctx) const;

private:
    std::shared_ptr<const SegmenterBackend> backend_;
    SegmenterConfig config_;
};

struct DamageAreas {
    std::size_t leaf_area_px = 0;
    std::size_t damage_area_px = 0;
    /// Empty when the leaf mask is empty.
    std::optional<double> ratio_pct;
};

/// Damage is clipped to the leaf before counting; ratio = 100 * damage / leaf.
[[nodiscard]] DamageAreas damage_ratio(const BinaryMask& leaf, const BinaryMask& damage);

struct DamageResult {
    TrackId track_id = 0;
    std::size_t best_frame = 0;
    DamageAreas areas;
};

}  // namespace plantdoctor

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "plantdoctor/image.hpp"
#include "plantdoctor/tracker.hpp"

namespace plantdoctor {

/// Fraction of the box size added on every side of a crop.
inline constexpr double kCropMargin = 0.05;

struct RoiEntry {
    TrackId track_id = 0;
    std::size_t frame_index = 0;
    PixelRect region;  // crop rectangle in frame coordinates
    Image roi;
    double sharpness = 0.0;
    double similarity = 1.0;
    double score = 0.0;
};

struct RoiStack {
    TrackId track_id = 0;
    std::vector<RoiEntry> entries;  // ordered by frame_index

    /// Per-axis median of the crop sizes; every SSIM comparison happens at this size.
    [[nodiscard]] std::pair<int, int> reference_size() const;
};

/// Integer crop rectangle: the box grown by the margin on each side, clamped
/// to the frame. nullopt when the box does not intersect the frame.
[[nodiscard]] std::optional<PixelRect> roi_region(const BoundingBox& box, int frame_width, int frame_height);

/// Pixel-exact copy of roi_region(); nullopt means "skip this entry".
[[nodiscard]] std::optional<Image> crop_roi(const Image& frame, const BoundingBox& box);

[[nodiscard]] inline double score_entry(double sharpness, double similarity) { return sharpness * similarity; }

/// Mean SSIM of entry `ordinal` against every other entry, all converted to
/// grayscale and resized to the stack's reference size. A lone entry scores 1.
[[nodiscard]] double compute_similarity(const RoiStack& stack, std::size_t ordinal);

/// Fills sharpness (Laplacian variance of the native-resolution grayscale crop),
/// similarity and score for every entry. Pairwise SSIM statistics are shared
/// across the stack.
void score_stack(RoiStack& stack);

/// Highest-score entry among those with similarity >= floor (earliest frame on
/// ties). Falls back to the whole stack when the floor removes everything.
[[nodiscard]] const RoiEntry& select_best(const RoiStack& stack, double similarity_floor);

inline constexpr double kDefaultSimilarityFloor = 0.4;

}  // namespace plantdoctor

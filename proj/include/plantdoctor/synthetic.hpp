#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "plantdoctor/detection.hpp"
#include "plantdoctor/image.hpp"
#include "plantdoctor/ingest.hpp"
#include "plantdoctor/segmentation.hpp"

namespace plantdoctor::synthetic {

using Rgb = std::array<std::uint8_t, 3>;

struct DamageBlob {
    // Centre in units of the leaf's semi-axes, leaf-local frame.
    double rel_x = 0.0;
    double rel_y = 0.0;
    double radius = 5.0;  // pixels
    Rgb color{150, 100, 50};
};

/// Closed frame interval.
struct FrameInterval {
    std::size_t first = 0;
    std::size_t last = 0;

    [[nodiscard]] bool contains(std::size_t f) const noexcept { return f >= first && f <= last; }
};

struct LeafSpec {
    int id_truth = 0;
    double semi_major = 40.0;  // pixels, along the leaf's local x axis
    double semi_minor = 25.0;
    double angle_deg = 0.0;
    Rgb color{70, 150, 60};
    double start_x = 0.0;
    double start_y = 0.0;
    double velocity_x = 0.0;  // pixels per frame
    double velocity_y = 0.0;
    /// Scripted per-frame centres; when non-empty it replaces the linear
    /// trajectory and its last point is held afterwards.
    std::vector<std::pair<double, double>> path;
    std::vector<DamageBlob> damage;
    std::vector<FrameInterval> occlusions;
    std::optional<double> flagged_confidence;

    [[nodiscard]] std::pair<double, double> center_at(std::size_t frame) const;
    [[nodiscard]] bool hidden_at(std::size_t frame) const;
};

struct SceneSpec {
    std::uint64_t seed = 1;
    std::size_t frame_count = 1;
    int width = 640;
    int height = 640;
    std::vector<LeafSpec> leaves;
    std::vector<std::size_t> blur_frames;  // frames carrying simulated motion blur
    int blur_radius = 4;

    void validate() const;
};

struct GroundTruthBox {
    int leaf_id = 0;
    PixelRect box;
    double confidence = 1.0;
};

struct LeafTruth {
    int leaf_id = 0;
    std::size_t leaf_area_px = 0;
    std::size_t damage_area_px = 0;

    [[nodiscard]] double ratio_pct() const {
        return leaf_area_px == 0 ? 0.0 : 100.0 * static_cast<double>(damage_area_px) / static_cast<double>(leaf_area_px);
    }
};

/// Leaf and damage rasters in a leaf-local window centred on the leaf.
struct LeafRaster {
    int radius = 0;  // window spans [-radius, radius] on both axes
    BinaryMask leaf;
    BinaryMask damage;  // already intersected with `leaf`

    [[nodiscard]] bool leaf_at(int dx, int dy) const noexcept;
    [[nodiscard]] bool damage_at(int dx, int dy) const noexcept;
};

/// Deterministic renderer: identical specs give byte-identical frames and truth.
/// Leaves are drawn in list order, later over earlier, at integer-rounded centres
/// so every visible frame of a leaf shows the same raster.
class SceneRenderer {
public:
    explicit SceneRenderer(SceneSpec spec);

    [[nodiscard]] const SceneSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] std::size_t frame_count() const noexcept { return spec_.frame_count; }

    [[nodiscard]] Frame render(std::size_t frame) const;
    [[nodiscard]] std::vector<GroundTruthBox> boxes(std::size_t frame) const;
    [[nodiscard]] std::vector<LeafTruth> truth() const;
    [[nodiscard]] const LeafRaster& raster(std::size_t leaf) const { return rasters_.at(leaf); }

    /// Index of the leaf visible at (x, y) of `frame`, or -1 for background.
    [[nodiscard]] int owner(std::size_t frame, int x, int y) const;
    [[nodiscard]] bool damaged(std::size_t leaf, std::size_t frame, int x, int y) const;

    /// Spec problems that do not prevent rendering (e.g. a leaf never in view).
    [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    [[nodiscard]] std::pair<int, int> rounded_center(std::size_t leaf, std::size_t frame) const;
    [[nodiscard]] bool covers(std::size_t leaf, std::size_t frame, int x, int y) const;

    SceneSpec spec_;
    std::vector<LeafRaster> rasters_;
    std::vector<std::string> warnings_;
};

struct RenderedScene {
    std::vector<Frame> frames;
    std::vector<std::vector<GroundTruthBox>> boxes;  // per frame
    std::vector<LeafTruth> truth;
};

[[nodiscard]] RenderedScene render(const SceneSpec& spec);

/// Detector backend answering from ground truth. Boxes are mapped through the
/// letterbox that ingest applies, so it works on normalized frames.
class OracleDetector final : public DetectorBackend {
public:
    OracleDetector(std::shared_ptr<const SceneRenderer> scene, int target_size);

    [[nodiscard]] std::vector<Detection> infer(const Frame& frame) const override;

private:
    std::shared_ptr<const SceneRenderer> scene_;
    Letterbox letterbox_;
};

/// Segmenter backend answering from ground truth: the ROI belongs to the leaf
/// with the most visible pixels inside the crop region, and the masks are that
/// leaf's visible (and damaged) pixels.
class OracleSegmenter final : public SegmenterBackend {
public:
    OracleSegmenter(std::shared_ptr<const SceneRenderer> scene, int target_size);

    [[nodiscard]] ProbabilityMap predict(const Image& roi, const RoiContext& ctx, MaskClass cls) const override;

private:
    std::shared_ptr<const SceneRenderer> scene_;
    Letterbox letterbox_;
};

/// Line-oriented `key = value` scene description; `[leaf]` opens a leaf block.
[[nodiscard]] SceneSpec parse_scene_spec(std::istream& in);
[[nodiscard]] SceneSpec load_scene_spec(const std::filesystem::path& path);
[[nodiscard]] std::string format_scene_spec(const SceneSpec& spec);

inline constexpr const char* kSceneFileName = "scene.spec";

/// Writes frames/NNNNNN.png, scene.spec, ground_truth.tsv, truth.csv and
/// per-leaf truth masks under masks/.
void write_scene(const SceneSpec& spec, const std::filesystem::path& out_dir);

}  // namespace plantdoctor::synthetic

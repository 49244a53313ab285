#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "plantdoctor/image.hpp"
#include "plantdoctor/ingest.hpp"

namespace plantdoctor {

struct Detection {
    BoundingBox bbox;
    double confidence = 1.0;
    std::size_t frame_index = 0;

    bool operator==(const Detection&) const = default;
};

struct DetectorConfig {
    double confidence_floor = 0.25;
    std::size_t max_detections_per_frame = 300;

    void validate() const;
};

/// Inference backend. Implementations must tolerate concurrent calls on
/// distinct frames. Failures are reported as BackendError, never as an empty
/// result.
class DetectorBackend {
public:
    virtual ~DetectorBackend() = default;

    [[nodiscard]] virtual std::vector<Detection> infer(const Frame& frame) const = 0;
};

/// Keeps detections with confidence >= floor, stable-sorted by descending
/// confidence, truncated to the per-frame maximum.
[[nodiscard]] std::vector<Detection> filter_detections(std::vector<Detection> dets, const DetectorConfig& cfg);

/// Intersection of `box` with the frame; nullopt when nothing positive remains.
[[nodiscard]] std::optional<BoundingBox> clamp_to_frame(const BoundingBox& box, int width, int height);

class Detector {
public:
    Detector(std::shared_ptr<const DetectorBackend> backend, DetectorConfig config);

    /// Backend output clamped to the frame, confidences clipped to [0, 1], then
    /// filtered.
    [[nodiscard]] std::vector<Detection> detect(const Frame& frame) const;

    [[nodiscard]] const DetectorConfig& config() const noexcept { return config_; }

private:
    std::shared_ptr<const DetectorBackend> backend_;
    DetectorConfig config_;
};

}  // namespace plantdoctor

#pragma once

#include <filesystem>
#include <memory>

#include "plantdoctor/detection.hpp"
#include "plantdoctor/segmentation.hpp"

namespace plantdoctor {

// Serialized-network backends executed through OpenCV's DNN module. Forward
// passes are serialized per backend instance.

/// Single-class YOLO-style detector. Accepts an output tensor shaped
/// [1, 4 + classes, anchors] or [1, anchors, 4 + classes] with boxes as
/// (cx, cy, w, h) in model-input pixels; applies non-maximum suppression.
class OnnxDetector final : public DetectorBackend {
public:
    explicit OnnxDetector(const std::filesystem::path& model, int input_size = 640, double nms_iou = 0.45);
    ~OnnxDetector() override;

    [[nodiscard]] std::vector<Detection> infer(const Frame& frame) const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Two-channel semantic segmenter: output [1, 2, H, W] holding per-pixel
/// probabilities for leaf (channel 0) and damage (channel 1).
class OnnxSegmenter final : public SegmenterBackend {
public:
    explicit OnnxSegmenter(const std::filesystem::path& model, int input_size = 512);
    ~OnnxSegmenter() override;

    [[nodiscard]] ProbabilityMap predict(const Image& roi, const RoiContext& ctx, MaskClass cls) const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace plantdoctor

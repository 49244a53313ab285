#include "plantdoctor/detection.hpp"

#include <algorithm>
#include <cmath>

#include "plantdoctor/errors.hpp"

namespace plantdoctor {

void DetectorConfig::validate() const {
    if (!(confidence_floor >= 0.0 && confidence_floor <= 1.0)) {
        throw InvalidArgument("confidence floor must lie in [0, 1]");
    }
    if (max_detections_per_frame == 0) {
        throw InvalidArgument("max detections per frame must be positive");
    }
}

std::vector<Detection> filter_detections(std::vector<Detection> dets, const DetectorConfig& cfg) {
    std::erase_if(dets, [&](const Detection& d) { return !(d.confidence >= cfg.confidence_floor); });
    std::stable_sort(dets.begin(), dets.end(),
                     [](const Detection& a, const Detection& b) { return a.confidence > b.confidence; });
    if (dets.size() > cfg.max_detections_per_frame) {
        dets.resize(cfg.max_detections_per_frame);
    }
    return dets;
}

std::optional<BoundingBox> clamp_to_frame(const BoundingBox& box, int width, int height) {
    if (!std::isfinite(box.x) || !std::isfinite(box.y) || !std::isfinite(box.width) || !std::isfinite(box.height)) {
        return std::nullopt;
    }
    const double x0 = std::clamp(box.x, 0.0, static_cast<double>(width));
    const double y0 = std::clamp(box.y, 0.0, static_cast<double>(height));
    const double x1 = std::clamp(box.x + box.width, 0.0, static_cast<double>(width));
    const double y1 = std::clamp(box.y + box.height, 0.0, static_cast<double>(height));
    if (x1 - x0 <= 0.0 || y1 - y0 <= 0.0) {
        return std::nullopt;
    }
    return BoundingBox{x0, y0, x1 - x0, y1 - y0};
}

Detector::Detector(std::shared_ptr<const DetectorBackend> backend, DetectorConfig config)
    : backend_(std::move(backend)), config_(config) {
    if (!backend_) {
        throw BackendError("no detector backend");
    }
    config_.validate();
}

std::vector<Detection> Detector::detect(const Frame& frame) const {
    std::vector<Detection> raw = backend_->infer(frame);
    std::vector<Detection> valid;
    valid.reserve(raw.size());
    for (Detection& d : raw) {
        auto clamped = clamp_to_frame(d.bbox, frame.width(), frame.height());
        if (!clamped || !std::isfinite(d.confidence)) {
            continue;
        }
        d.bbox = *clamped;
        d.confidence = std::clamp(d.confidence, 0.0, 1.0);
        d.frame_index = frame.index;
        valid.push_back(d);
    }
    return filter_detections(std::move(valid), config_);
}

}  // namespace plantdoctor

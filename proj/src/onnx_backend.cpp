#include "plantdoctor/onnx_backend.hpp"

#include <algorithm>
#include <mutex>
#include <utility>

#include <opencv2/core.hpp>
#include <opencv2/dnn.hpp>
#include <opencv2/imgproc.hpp>

#include "plantdoctor/errors.hpp"

namespace plantdoctor {

namespace {

cv::dnn::Net load_net(const std::filesystem::path& model) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(model, ec)) {
        throw BackendError("model file not found: " + model.string());
    }
    try {
        cv::dnn::Net net = cv::dnn::readNetFromONNX(model.string());
        if (net.empty()) {
            throw BackendError("model has no layers: " + model.string());
        }
        return net;
    } catch (const cv::Exception& e) {
        throw BackendError("cannot load model " + model.string() + ": " + e.what());
    }
}

cv::Mat to_blob(const Image& img, int side) {
    cv::Mat rgb(img.height, img.width, CV_8UC3, const_cast<std::uint8_t*>(img.pixels.data()));
    return cv::dnn::blobFromImage(rgb, 1.0 / 255.0, cv::Size(side, side), cv::Scalar(), false, false, CV_32F);
}

}  // namespace

struct OnnxDetector::Impl {
    Impl(cv::dnn::Net n, int size, double iou) : net(std::move(n)), input_size(size), nms_iou(iou) {}

    cv::dnn::Net net;
    int input_size;
    double nms_iou;
    std::mutex mutex;
};

OnnxDetector::OnnxDetector(const std::filesystem::path& model, int input_size, double nms_iou)
    : impl_(std::make_unique<Impl>(load_net(model), input_size, nms_iou)) {
    if (input_size <= 0) {
        throw InvalidArgument("detector input size must be positive");
    }
}

OnnxDetector::~OnnxDetector() = default;

std::vector<Detection> OnnxDetector::infer(const Frame& frame) const {
    cv::Mat out;
    try {
        const cv::Mat blob = to_blob(frame.image, impl_->input_size);
        const std::lock_guard lock(impl_->mutex);
        impl_->net.setInput(blob);
        out = impl_->net.forward().clone();
    } catch (const cv::Exception& e) {
        throw BackendError(std::string("detector inference failed: ") + e.what());
    }
    if (out.dims != 3 || out.size[0] != 1) {
        throw BackendError("detector output must be a [1, C, N] tensor");
    }
    // Attributes along the smaller axis: 4 box values plus one score per class.
    const bool channels_first = out.size[1] <= out.size[2];
    const int attrs = channels_first ? out.size[1] : out.size[2];
    const int anchors = channels_first ? out.size[2] : out.size[1];
    if (attrs < 5) {
        throw BackendError("detector output needs at least 5 attributes per anchor");
    }
    const auto* data = reinterpret_cast<const float*>(out.data);
    auto value = [&](int anchor, int attr) {
        return channels_first ? data[attr * anchors + anchor] : data[anchor * attrs + attr];
    };

    const double sx = static_cast<double>(frame.width()) / impl_->input_size;
    const double sy = static_cast<double>(frame.height()) / impl_->input_size;
    std::vector<cv::Rect2d> boxes;
    std::vector<float> scores;
    for (int a = 0; a < anchors; ++a) {
        float score = 0.0F;
        for (int c = 4; c < attrs; ++c) {
            score = std::max(score, value(a, c));
        }
        if (score < 1e-3F) {
            continue;
        }
        const double w = value(a, 2) * sx;
        const double h = value(a, 3) * sy;
        boxes.emplace_back(value(a, 0) * sx - w / 2.0, value(a, 1) * sy - h / 2.0, w, h);
        scores.push_back(score);
    }
    std::vector<int> keep;
    cv::dnn::NMSBoxes(boxes, scores, 1e-3F, static_cast<float>(impl_->nms_iou), keep);
    std::vector<Detection> dets;
    dets.reserve(keep.size());
    for (int k : keep) {
        const cv::Rect2d& b = boxes[static_cast<std::size_t>(k)];
        dets.push_back({BoundingBox{b.x, b.y, b.width, b.height}, scores[static_cast<std::size_t>(k)], frame.index});
    }
    return dets;
}

struct OnnxSegmenter::Impl {
    Impl(cv::dnn::Net n, int size) : net(std::move(n)), input_size(size) {}

    cv::dnn::Net net;
    int input_size;
    std::mutex mutex;
};

OnnxSegmenter::OnnxSegmenter(const std::filesystem::path& model, int input_size)
    : impl_(std::make_unique<Impl>(load_net(model), input_size)) {
    if (input_size <= 0) {
        throw InvalidArgument("segmenter input size must be positive");
    }
}

OnnxSegmenter::~OnnxSegmenter() = default;

ProbabilityMap OnnxSegmenter::predict(const Image& roi, const RoiContext& /*ctx*/, MaskClass cls) const {
    cv::Mat out;
    try {
        const cv::Mat blob = to_blob(roi, impl_->input_size);
        const std::lock_guard lock(impl_->mutex);
        impl_->net.setInput(blob);
        out = impl_->net.forward().clone();
    } catch (const cv::Exception& e) {
        throw BackendError(std::string("segmenter inference failed: ") + e.what());
    }
    if (out.dims != 4 || out.size[0] != 1 || out.size[1] < 2) {
        throw BackendError("segmenter output must be a [1, 2, H, W] tensor");
    }
    const int h = out.size[2];
    const int w = out.size[3];
    const int channel = cls == MaskClass::leaf ? 0 : 1;
    cv::Mat plane(h, w, CV_32F, out.ptr<float>(0, channel));
    cv::Mat resized;
    cv::resize(plane, resized, cv::Size(roi.width, roi.height), 0, 0, cv::INTER_LINEAR);
    ProbabilityMap probs{roi.width, roi.height, {}};
    probs.values.reserve(static_cast<std::size_t>(roi.width) * static_cast<std::size_t>(roi.height));
    for (int y = 0; y < resized.rows; ++y) {
        const float* row = resized.ptr<float>(y);
        for (int x = 0; x < resized.cols; ++x) {
            probs.values.push_back(std::clamp(row[x], 0.0F, 1.0F));
        }
    }
    return probs;
}

}  // namespace plantdoctor

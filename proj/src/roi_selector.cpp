#include "plantdoctor/roi_selector.hpp"

#include <algorithm>
#include <cmath>

#include "plantdoctor/errors.hpp"
#include "plantdoctor/metrics.hpp"

namespace plantdoctor {

namespace {

int median(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

metrics::SsimReference normalized(const RoiEntry& e, std::pair<int, int> size) {
    return metrics::SsimReference(resize_bilinear(to_gray(e.roi), size.first, size.second));
}

double sharpness_of(const Image& roi) {
    if (roi.width < 3 || roi.height < 3) {
        return 0.0;
    }
    return metrics::laplacian_variance(to_gray(roi));
}

}  // namespace

std::pair<int, int> RoiStack::reference_size() const {
    if (entries.empty()) {
        throw InvalidArgument("reference size of an empty stack");
    }
    std::vector<int> w;
    std::vector<int> h;
    for (const RoiEntry& e : entries) {
        w.push_back(e.roi.width);
        h.push_back(e.roi.height);
    }
    const int window = metrics::SsimParams{}.window;
    return {std::max(median(w), window), std::max(median(h), window)};
}

std::optional<PixelRect> roi_region(const BoundingBox& box, int frame_width, int frame_height) {
    const double mx = box.width * kCropMargin;
    const double my = box.height * kCropMargin;
    const int x0 = std::max(0, static_cast<int>(std::floor(box.x - mx)));
    const int y0 = std::max(0, static_cast<int>(std::floor(box.y - my)));
    const int x1 = std::min(frame_width, static_cast<int>(std::ceil(box.x + box.width + mx)));
    const int y1 = std::min(frame_height, static_cast<int>(std::ceil(box.y + box.height + my)));
    if (x1 <= x0 || y1 <= y0 || box.width <= 0.0 || box.height <= 0.0) {
        return std::nullopt;
    }
    return PixelRect{x0, y0, x1 - x0, y1 - y0};
}

std::optional<Image> crop_roi(const Image& frame, const BoundingBox& box) {
    const auto region = roi_region(box, frame.width, frame.height);
    if (!region) {
        return std::nullopt;
    }
    return crop(frame, *region);
}

double compute_similarity(const RoiStack& stack, std::size_t ordinal) {
    if (ordinal >= stack.entries.size()) {
        throw InvalidArgument("stack entry out of range");
    }
    if (stack.entries.size() == 1) {
        return 1.0;
    }
    const auto size = stack.reference_size();
    const auto self = normalized(stack.entries[ordinal], size);
    double sum = 0.0;
    for (std::size_t i = 0; i < stack.entries.size(); ++i) {
        if (i != ordinal) {
            sum += self.compare(normalized(stack.entries[i], size));
        }
    }
    return sum / static_cast<double>(stack.entries.size() - 1);
}

void score_stack(RoiStack& stack) {
    const std::size_t n = stack.entries.size();
    if (n == 0) {
        return;
    }
    std::vector<double> similarity(n, 1.0);
    if (n > 1) {
        const auto size = stack.reference_size();
        std::vector<metrics::SsimReference> refs;
        refs.reserve(n);
        for (const RoiEntry& e : stack.entries) {
            refs.push_back(normalized(e, size));
        }
        std::vector<double> sum(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double s = refs[i].compare(refs[j]);
                sum[i] += s;
                sum[j] += s;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            similarity[i] = sum[i] / static_cast<double>(n - 1);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        RoiEntry& e = stack.entries[i];
        e.sharpness = sharpness_of(e.roi);
        e.similarity = similarity[i];
        e.score = score_entry(e.sharpness, e.similarity);
    }
}

const RoiEntry& select_best(const RoiStack& stack, double similarity_floor) {
    if (stack.entries.empty()) {
        throw InvalidArgument("select_best on an empty stack");
    }
    const RoiEntry* best = nullptr;
    auto better = [](const RoiEntry& a, const RoiEntry* b) {
        return b == nullptr || a.score > b->score || (a.score == b->score && a.frame_index < b->frame_index);
    };
    for (const RoiEntry& e : stack.entries) {
        if (e.similarity >= similarity_floor && better(e, best)) {
            best = &e;
        }
    }
    if (best == nullptr) {
        for (const RoiEntry& e : stack.entries) {
            if (better(e, best)) {
                best = &e;
            }
        }
    }
    return *best;
}

}  // namespace plantdoctor

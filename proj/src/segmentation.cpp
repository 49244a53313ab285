#include "plantdoctor/segmentation.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "plantdoctor/errors.hpp"

namespace plantdoctor {

namespace {

int reflect101(int i, int n) {
    if (n == 1) {
        return 0;
    }
    while (i < 0 || i >= n) {
        i = i < 0 ? -i : 2 * (n - 1) - i;
    }
    return i;
}

std::uint8_t to_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

struct Ycc {
    double y;
    double cb;
    double cr;
};

Ycc to_ycc(const std::uint8_t* p) {
    const double r = p[0];
    const double g = p[1];
    const double b = p[2];
    return {0.299 * r + 0.587 * g + 0.114 * b, 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b,
            128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b};
}

}  // namespace

void SegmenterConfig::validate() const {
    if (!(binarization_threshold > 0.0 && binarization_threshold < 1.0)) {
        throw InvalidArgument("segmenter binarization threshold must lie in (0, 1)");
    }
}

Image gaussian_blur_5x5(const Image& img, double sigma) {
    if (img.empty()) {
        throw InvalidArgument("blur of an empty image");
    }
    std::array<double, 5> k{};
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
        k[static_cast<std::size_t>(i)] = std::exp(-((i - 2) * (i - 2)) / (2.0 * sigma * sigma));
        sum += k[static_cast<std::size_t>(i)];
    }
    for (double& v : k) {
        v /= sum;
    }
    const int w = img.width;
    const int h = img.height;
    std::vector<double> horiz(static_cast<std::size_t>(w) * h * 3);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int i = -2; i <= 2; ++i) {
                    acc += k[static_cast<std::size_t>(i + 2)] * img.at(reflect101(x + i, w), y)[c];
                }
                horiz[img.offset(x, y) + static_cast<std::size_t>(c)] = acc;
            }
        }
    }
    Image out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int i = -2; i <= 2; ++i) {
                    acc += k[static_cast<std::size_t>(i + 2)] * horiz[img.offset(x, reflect101(y + i, h)) + static_cast<std::size_t>(c)];
                }
                out.at(x, y)[c] = to_u8(acc);
            }
        }
    }
    return out;
}

Image equalize_luminance(const Image& img) {
    if (img.empty()) {
        throw InvalidArgument("equalization of an empty image");
    }
    const std::size_t n = img.pixels.size() / 3;
    std::vector<Ycc> ycc(n);
    std::array<std::size_t, 256> hist{};
    for (std::size_t i = 0; i < n; ++i) {
        ycc[i] = to_ycc(img.pixels.data() + i * 3);
        ++hist[to_u8(ycc[i].y)];
    }
    const auto occupied = std::count_if(hist.begin(), hist.end(), [](std::size_t c) { return c > 0; });
    if (occupied <= 1) {
        return img;
    }
    // lut[v] = floor(255 * cdf(v))
    std::array<int, 256> shift{};
    std::size_t cumulative = 0;
    for (int v = 0; v < 256; ++v) {
        cumulative += hist[static_cast<std::size_t>(v)];
        const int mapped = static_cast<int>((255 * cumulative) / n);
        shift[static_cast<std::size_t>(v)] = mapped - v;
    }
    Image out(img.width, img.height);
    for (std::size_t i = 0; i < n; ++i) {
        const Ycc& p = ycc[i];
        const double y = p.y + shift[to_u8(p.y)];
        std::uint8_t* q = out.pixels.data() + i * 3;
        q[0] = to_u8(y + 1.402 * (p.cr - 128.0));
        q[1] = to_u8(y - 0.344136 * (p.cb - 128.0) - 0.714136 * (p.cr - 128.0));
        q[2] = to_u8(y + 1.772 * (p.cb - 128.0));
    }
    return out;
}

Image preprocess(const Image& roi) {
    return equalize_luminance(gaussian_blur_5x5(roi));
}

BinaryMask binarize(const ProbabilityMap& probs, double threshold) {
    if (probs.values.size() != static_cast<std::size_t>(probs.width) * static_cast<std::size_t>(probs.height)) {
        throw BackendError("probability map size does not match its geometry");
    }
    BinaryMask mask(probs.width, probs.height);
    for (std::size_t i = 0; i < probs.values.size(); ++i) {
        mask.bits[i] = probs.values[i] >= threshold ? 1 : 0;
    }
    return mask;
}

BinaryMask largest_component(const BinaryMask& mask) {
    const int w = mask.width;
    const int h = mask.height;
    std::vector<int> label(mask.bits.size(), 0);
    std::vector<std::size_t> sizes{0};
    std::vector<std::size_t> queue;
    for (std::size_t start = 0; start < mask.bits.size(); ++start) {
        if (!mask.bits[start] || label[start] != 0) {
            continue;
        }
        const int id = static_cast<int>(sizes.size());
        sizes.push_back(0);
        queue.assign(1, start);
        label[start] = id;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::size_t p = queue[head];
            ++sizes.back();
            const int x = static_cast<int>(p % static_cast<std::size_t>(w));
            const int y = static_cast<int>(p / static_cast<std::size_t>(w));
            const std::array<std::pair<int, int>, 4> nbrs{{{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}}};
            for (auto [nx, ny] : nbrs) {
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
                    continue;
                }
                const std::size_t q = static_cast<std::size_t>(ny) * static_cast<std::size_t>(w) + static_cast<std::size_t>(nx);
                if (mask.bits[q] && label[q] == 0) {
                    label[q] = id;
                    queue.push_back(q);
                }
            }
        }
    }
    BinaryMask out(w, h);
    if (sizes.size() == 1) {
        return out;
    }
    const auto best = static_cast<int>(std::max_element(sizes.begin() + 1, sizes.end()) - sizes.begin());
    for (std::size_t i = 0; i < label.size(); ++i) {
        out.bits[i] = label[i] == best ? 1 : 0;
    }
    return out;
}

Segmenter::Segmenter(std::shared_ptr<const SegmenterBackend> backend, SegmenterConfig config)
    : backend_(std::move(backend)), config_(config) {
    if (!backend_) {
        throw BackendError("no segmenter backend");
    }
    config_.validate();
}

BinaryMask Segmenter::segment_leaf(const Image& roi, const RoiContext& ctx) const {
    const ProbabilityMap probs = backend_->predict(roi, ctx, MaskClass::leaf);
    if (probs.width != roi.width || probs.height != roi.height) {
        throw BackendError("leaf probability map does not match the ROI size");
    }
    return largest_component(binarize(probs, config_.binarization_threshold));
}

BinaryMask Segmenter::segment_damage(const Image& roi, const RoiContext& ctx) const {
    const ProbabilityMap probs = backend_->predict(roi, ctx, MaskClass::damage);
    if (probs.width != roi.width || probs.height != roi.height) {
        throw BackendError("damage probability map does not match the ROI size");
    }
    return binarize(probs, config_.binarization_threshold);
}

DamageAreas damage_ratio(const BinaryMask& leaf, const BinaryMask& damage) {
    if (leaf.width != damage.width || leaf.height != damage.height) {
        throw InvalidArgument("leaf and damage masks differ in size");
    }
    DamageAreas out;
    for (std::size_t i = 0; i < leaf.bits.size(); ++i) {
        if (leaf.bits[i]) {
            ++out.leaf_area_px;
            out.damage_area_px += damage.bits[i] ? 1 : 0;
        }
    }
    if (out.leaf_area_px > 0) {
        out.ratio_pct = 100.0 * static_cast<double>(out.damage_area_px) / static_cast<double>(out.leaf_area_px);
    }
    return out;
}

}  // namespace plantdoctor

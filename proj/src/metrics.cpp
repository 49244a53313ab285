#include "plantdoctor/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "plantdoctor/errors.hpp"

namespace plantdoctor::metrics {

namespace {

std::vector<double> gaussian_kernel(int size, double sigma) {
    std::vector<double> k(static_cast<std::size_t>(size));
    const double c = (size - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - c;
        k[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        sum += k[static_cast<std::size_t>(i)];
    }
    for (double& v : k) {
        v /= sum;
    }
    return k;
}

// Separable correlation keeping only fully-contained windows.
GrayImage filter_valid(const GrayImage& img, const std::vector<double>& k) {
    const int n = static_cast<int>(k.size());
    const int ow = img.width - n + 1;
    const int oh = img.height - n + 1;
    GrayImage horiz(ow, img.height);
    for (int y = 0; y < img.height; ++y) {
        const double* row = img.pixels.data() + static_cast<std::size_t>(y) * img.width;
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += k[static_cast<std::size_t>(i)] * row[x + i];
            }
            horiz.at(x, y) = acc;
        }
    }
    GrayImage out(ow, oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += k[static_cast<std::size_t>(i)] * horiz.at(x, y + i);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

GrayImage product(const GrayImage& a, const GrayImage& b) {
    GrayImage out(a.width, a.height);
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        out.pixels[i] = a.pixels[i] * b.pixels[i];
    }
    return out;
}

void check_same_size(const BinaryMask& a, const BinaryMask& b) {
    if (a.width != b.width || a.height != b.height) {
        throw InvalidArgument("mask dimensions differ");
    }
}

struct Overlap {
    std::size_t a = 0;
    std::size_t b = 0;
    std::size_t both = 0;
};

Overlap overlap(const BinaryMask& a, const BinaryMask& b) {
    check_same_size(a, b);
    Overlap o;
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        const bool pa = a.bits[i] != 0;
        const bool pb = b.bits[i] != 0;
        o.a += pa;
        o.b += pb;
        o.both += pa && pb;
    }
    return o;
}

}  // namespace

double laplacian_variance(const GrayImage& img) {
    if (img.width < 3 || img.height < 3) {
        throw InvalidArgument("laplacian variance needs at least 3x3 pixels");
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    const auto count = static_cast<double>(img.width - 2) * static_cast<double>(img.height - 2);
    for (int y = 1; y < img.height - 1; ++y) {
        for (int x = 1; x < img.width - 1; ++x) {
            const double r = img.at(x, y - 1) + img.at(x - 1, y) + img.at(x + 1, y) + img.at(x, y + 1) - 4.0 * img.at(x, y);
            sum += r;
            sum_sq += r * r;
        }
    }
    const double mean = sum / count;
    return std::max(0.0, sum_sq / count - mean * mean);
}

SsimReference::SsimReference(GrayImage img, const SsimParams& params) : img_(std::move(img)), params_(params) {
    if (img_.width < params_.window || img_.height < params_.window) {
        throw InvalidArgument("ssim input smaller than the window");
    }
    const auto k = gaussian_kernel(params_.window, params_.sigma);
    mean_ = filter_valid(img_, k);
    variance_ = filter_valid(product(img_, img_), k);
    for (std::size_t i = 0; i < variance_.pixels.size(); ++i) {
        variance_.pixels[i] -= mean_.pixels[i] * mean_.pixels[i];
    }
}

double SsimReference::compare(const SsimReference& other) const {
    if (img_.width != other.img_.width || img_.height != other.img_.height) {
        throw InvalidArgument("ssim inputs differ in size");
    }
    const auto k = gaussian_kernel(params_.window, params_.sigma);
    const GrayImage cross = filter_valid(product(img_, other.img_), k);
    const double c1 = std::pow(params_.k1 * params_.dynamic_range, 2);
    const double c2 = std::pow(params_.k2 * params_.dynamic_range, 2);
    double total = 0.0;
    for (std::size_t i = 0; i < cross.pixels.size(); ++i) {
        const double mx = mean_.pixels[i];
        const double my = other.mean_.pixels[i];
        const double cov = cross.pixels[i] - mx * my;
        const double num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
        const double den = (mx * mx + my * my + c1) * (variance_.pixels[i] + other.variance_.pixels[i] + c2);
        total += num / den;
    }
    return total / static_cast<double>(cross.pixels.size());
}

double ssim(const GrayImage& a, const GrayImage& b, const SsimParams& params) {
    if (a.width != b.width || a.height != b.height) {
        throw InvalidArgument("ssim inputs differ in size");
    }
    return SsimReference(a, params).compare(SsimReference(b, params));
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
    const Overlap o = overlap(a, b);
    const std::size_t uni = o.a + o.b - o.both;
    return uni == 0 ? 1.0 : static_cast<double>(o.both) / static_cast<double>(uni);
}

double dice(const BinaryMask& a, const BinaryMask& b) {
    const Overlap o = overlap(a, b);
    const std::size_t sum = o.a + o.b;
    return sum == 0 ? 1.0 : 2.0 * static_cast<double>(o.both) / static_cast<double>(sum);
}

}  // namespace plantdoctor::metrics

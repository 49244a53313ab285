#include "plantdoctor/image.hpp"

#include <algorithm>
#include <cmath>

#include "plantdoctor/errors.hpp"

namespace plantdoctor {

namespace {

std::size_t area(int w, int h) {
    return static_cast<std::size_t>(std::max(w, 0)) * static_cast<std::size_t>(std::max(h, 0));
}

void check_inside(int w, int h, const PixelRect& r) {
    if (r.empty() || r.x < 0 || r.y < 0 || r.right() > w || r.bottom() > h) {
        throw InvalidArgument("crop rectangle outside image");
    }
}

// Source coordinate and blend weight for one destination sample.
struct Tap {
    int lo;
    int hi;
    double frac;
};

std::vector<Tap> bilinear_taps(int src, int dst) {
    std::vector<Tap> taps(static_cast<std::size_t>(dst));
    const double scale = static_cast<double>(src) / static_cast<double>(dst);
    for (int i = 0; i < dst; ++i) {
        double s = (i + 0.5) * scale - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(src - 1));
        const int lo = static_cast<int>(std::floor(s));
        const int hi = std::min(lo + 1, src - 1);
        taps[static_cast<std::size_t>(i)] = {lo, hi, s - lo};
    }
    return taps;
}

}  // namespace

Image::Image(int w, int h, std::uint8_t fill) : width(w), height(h), pixels(area(w, h) * 3, fill) {}

GrayImage::GrayImage(int w, int h, double fill) : width(w), height(h), pixels(area(w, h), fill) {}

BinaryMask::BinaryMask(int w, int h, bool fill) : width(w), height(h), bits(area(w, h), fill ? 1 : 0) {}

std::size_t BinaryMask::count() const noexcept {
    return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
    const double x0 = std::max(a.x, b.x);
    const double y0 = std::max(a.y, b.y);
    const double x1 = std::min(a.x + a.width, b.x + b.width);
    const double y1 = std::min(a.y + a.height, b.y + b.height);
    const double inter = std::max(0.0, x1 - x0) * std::max(0.0, y1 - y0);
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

GrayImage to_gray(const Image& img) {
    GrayImage out(img.width, img.height);
    const std::size_t n = area(img.width, img.height);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* p = img.pixels.data() + i * 3;
        out.pixels[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
    return out;
}

Image crop(const Image& img, const PixelRect& rect) {
    check_inside(img.width, img.height, rect);
    Image out(rect.width, rect.height);
    const std::size_t row_bytes = static_cast<std::size_t>(rect.width) * 3;
    for (int y = 0; y < rect.height; ++y) {
        std::copy_n(img.at(rect.x, rect.y + y), row_bytes, out.at(0, y));
    }
    return out;
}

BinaryMask crop(const BinaryMask& mask, const PixelRect& rect) {
    check_inside(mask.width, mask.height, rect);
    BinaryMask out(rect.width, rect.height);
    for (int y = 0; y < rect.height; ++y) {
        for (int x = 0; x < rect.width; ++x) {
            out.at(x, y) = mask.at(rect.x + x, rect.y + y) ? 1 : 0;
        }
    }
    return out;
}

Image resize_bilinear(const Image& img, int width, int height) {
    if (img.empty() || width <= 0 || height <= 0) {
        throw InvalidArgument("resize of empty image or to empty size");
    }
    if (img.width == width && img.height == height) {
        return img;
    }
    const auto tx = bilinear_taps(img.width, width);
    const auto ty = bilinear_taps(img.height, height);
    Image out(width, height);
    for (int y = 0; y < height; ++y) {
        const Tap& vy = ty[static_cast<std::size_t>(y)];
        for (int x = 0; x < width; ++x) {
            const Tap& vx = tx[static_cast<std::size_t>(x)];
            const std::uint8_t* p00 = img.at(vx.lo, vy.lo);
            const std::uint8_t* p01 = img.at(vx.hi, vy.lo);
            const std::uint8_t* p10 = img.at(vx.lo, vy.hi);
            const std::uint8_t* p11 = img.at(vx.hi, vy.hi);
            std::uint8_t* q = out.at(x, y);
            for (int c = 0; c < 3; ++c) {
                const double top = p00[c] + (p01[c] - p00[c]) * vx.frac;
                const double bot = p10[c] + (p11[c] - p10[c]) * vx.frac;
                const double v = top + (bot - top) * vy.frac;
                q[c] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
            }
        }
    }
    return out;
}

GrayImage resize_bilinear(const GrayImage& img, int width, int height) {
    if (img.empty() || width <= 0 || height <= 0) {
        throw InvalidArgument("resize of empty image or to empty size");
    }
    if (img.width == width && img.height == height) {
        return img;
    }
    const auto tx = bilinear_taps(img.width, width);
    const auto ty = bilinear_taps(img.height, height);
    GrayImage out(width, height);
    for (int y = 0; y < height; ++y) {
        const Tap& vy = ty[static_cast<std::size_t>(y)];
        for (int x = 0; x < width; ++x) {
            const Tap& vx = tx[static_cast<std::size_t>(x)];
            const double top = img.at(vx.lo, vy.lo) + (img.at(vx.hi, vy.lo) - img.at(vx.lo, vy.lo)) * vx.frac;
            const double bot = img.at(vx.lo, vy.hi) + (img.at(vx.hi, vy.hi) - img.at(vx.lo, vy.hi)) * vx.frac;
            out.at(x, y) = top + (bot - top) * vy.frac;
        }
    }
    return out;
}

BinaryMask upscale_nearest(const BinaryMask& mask, int factor) {
    if (factor <= 0) {
        throw InvalidArgument("upscale factor must be positive");
    }
    BinaryMask out(mask.width * factor, mask.height * factor);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            out.at(x, y) = mask.at(x / factor, y / factor) ? 1 : 0;
        }
    }
    return out;
}

}  // namespace plantdoctor

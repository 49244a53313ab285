#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace plantdoctor {

/// Row-major 8-bit RGB raster.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // width * height * 3

    Image() = default;
    Image(int w, int h, std::uint8_t fill = 0);

    [[nodiscard]] bool empty() const noexcept { return width <= 0 || height <= 0; }
    [[nodiscard]] std::size_t offset(int x, int y) const noexcept {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
    }
    [[nodiscard]] std::uint8_t* at(int x, int y) noexcept { return pixels.data() + offset(x, y); }
    [[nodiscard]] const std::uint8_t* at(int x, int y) const noexcept { return pixels.data() + offset(x, y); }

    bool operator==(const Image&) const = default;
};

/// Single-channel image with real-valued samples, nominally in [0, 255].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0);

    [[nodiscard]] bool empty() const noexcept { return width <= 0 || height <= 0; }
    [[nodiscard]] double& at(int x, int y) noexcept {
        return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
    }
    [[nodiscard]] double at(int x, int y) const noexcept {
        return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
    }
};

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // 0 or 1

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false);

    [[nodiscard]] bool empty() const noexcept { return width <= 0 || height <= 0; }
    [[nodiscard]] std::uint8_t& at(int x, int y) noexcept {
        return bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
    }
    [[nodiscard]] bool at(int x, int y) const noexcept {
        return bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] != 0;
    }
    [[nodiscard]] std::size_t count() const noexcept;

    bool operator==(const BinaryMask&) const = default;
};

/// Integer pixel rectangle, top-left origin, half-open on the far edges.
struct PixelRect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    [[nodiscard]] bool empty() const noexcept { return width <= 0 || height <= 0; }
    [[nodiscard]] int right() const noexcept { return x + width; }
    [[nodiscard]] int bottom() const noexcept { return y + height; }

    bool operator==(const PixelRect&) const = default;
};

/// Sub-pixel box, top-left origin.
struct BoundingBox {
    double x = 0.0;
    double y = 0.0;
    double width = 0.0;
    double height = 0.0;

    [[nodiscard]] double center_x() const noexcept { return x + width / 2.0; }
    [[nodiscard]] double center_y() const noexcept { return y + height / 2.0; }
    [[nodiscard]] double area() const noexcept { return width * height; }

    bool operator==(const BoundingBox&) const = default;
};

[[nodiscard]] double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

/// ITU-R BT.601 luma of every pixel.
[[nodiscard]] GrayImage to_gray(const Image& img);

/// Copy of a rectangular region. The rectangle must lie inside the image.
[[nodiscard]] Image crop(const Image& img, const PixelRect& rect);
[[nodiscard]] BinaryMask crop(const BinaryMask& mask, const PixelRect& rect);

/// Bilinear resampling with half-pixel centres; same-size input is copied verbatim.
[[nodiscard]] Image resize_bilinear(const Image& img, int width, int height);
[[nodiscard]] GrayImage resize_bilinear(const GrayImage& img, int width, int height);

/// Nearest-neighbour upscale by an integer factor.
[[nodiscard]] BinaryMask upscale_nearest(const BinaryMask& mask, int factor);

}  // namespace plantdoctor

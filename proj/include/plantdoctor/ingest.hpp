#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "plantdoctor/image.hpp"

namespace plantdoctor {

/// One frame of the normalized stream. `index` counts kept frames, `source_index`
/// counts frames of the original footage.
struct Frame {
    std::size_t index = 0;
    std::size_t source_index = 0;
    Image image;

    [[nodiscard]] int width() const noexcept { return image.width; }
    [[nodiscard]] int height() const noexcept { return image.height; }
};

struct IngestConfig {
    double source_fps = 3.0;
    double target_fps = 3.0;
    int target_size = 640;

    void validate() const;
};

/// Source ordinals kept when reducing `source_fps` to `target_fps`:
/// floor(k * source / target) for k = 0, 1, ... while below `frame_count`.
[[nodiscard]] std::vector<std::size_t> downsample_indices(double source_fps, double target_fps,
                                                          std::size_t frame_count);

/// Geometry of an aspect-preserving fit of a WxH raster into a square canvas.
struct Letterbox {
    int source_width = 0;
    int source_height = 0;
    int target_size = 0;
    double scale = 1.0;
    int content_width = 0;
    int content_height = 0;
    int offset_x = 0;
    int offset_y = 0;

    [[nodiscard]] static Letterbox fit(int source_width, int source_height, int target_size);

    [[nodiscard]] bool identity() const noexcept {
        return source_width == target_size && source_height == target_size;
    }
    [[nodiscard]] BoundingBox to_target(const BoundingBox& box) const noexcept;
    /// Continuous source coordinate of the centre of target pixel (x, y).
    [[nodiscard]] double source_x(int x) const noexcept;
    [[nodiscard]] double source_y(int y) const noexcept;
};

/// Letterboxes `frame` to target_size x target_size with black bars and bilinear
/// resampling. Frames already at the target size are returned unchanged.
[[nodiscard]] Frame resize_frame(const Frame& frame, int target_size);

/// Ordered producer of raw frames from some medium.
class FrameSource {
public:
    virtual ~FrameSource() = default;

    virtual std::optional<Image> next() = 0;
    /// Advances past one frame without decoding it; false at end of stream.
    virtual bool skip() { return next().has_value(); }
};

/// Numbered PNG/JPEG files in a directory, visited in lexicographic filename order.
class ImageDirectorySource final : public FrameSource {
public:
    explicit ImageDirectorySource(const std::filesystem::path& dir);

    std::optional<Image> next() override;
    bool skip() override;

    [[nodiscard]] std::size_t size() const noexcept { return files_.size(); }
    [[nodiscard]] const std::vector<std::filesystem::path>& files() const noexcept { return files_; }

private:
    std::vector<std::filesystem::path> files_;
    std::size_t cursor_ = 0;
};

/// Headerless RGB24 frames of declared geometry read back to back from a stream.
class RawRgbSource final : public FrameSource {
public:
    RawRgbSource(std::istream& in, int width, int height);

    std::optional<Image> next() override;

private:
    std::istream* in_;
    int width_;
    int height_;
};

class MemorySource final : public FrameSource {
public:
    explicit MemorySource(std::vector<Image> frames);

    std::optional<Image> next() override;
    bool skip() override;

private:
    std::vector<Image> frames_;
    std::size_t cursor_ = 0;
};

/// Downsamples and letterboxes a FrameSource into the normalized stream.
class FrameStream {
public:
    FrameStream(std::unique_ptr<FrameSource> source, IngestConfig config);

    std::optional<Frame> next();

    [[nodiscard]] const IngestConfig& config() const noexcept { return config_; }

private:
    std::unique_ptr<FrameSource> source_;
    IngestConfig config_;
    std::size_t position_ = 0;  // next unread source ordinal
    std::size_t kept_ = 0;
};

/// Parses "WxH" (e.g. "1920x1080").
[[nodiscard]] std::pair<int, int> parse_geometry(const std::string& text);

}  // namespace plantdoctor

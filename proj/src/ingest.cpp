#include "plantdoctor/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <string>

#include "plantdoctor/errors.hpp"
#include "plantdoctor/image_io.hpp"

namespace plantdoctor {

namespace {

// Guards floor(k * s / t) against representation error in fractional rates.
constexpr double kStrideEpsilon = 1e-9;

std::size_t kept_ordinal(std::size_t k, double source_fps, double target_fps) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(k) * source_fps / target_fps + kStrideEpsilon));
}

}  // namespace

void IngestConfig::validate() const {
    if (!(target_fps > 0.0) || !std::isfinite(target_fps)) {
        throw InvalidArgument("target fps must be positive");
    }
    if (!std::isfinite(source_fps) || target_fps > source_fps) {
        throw InvalidArgument("target fps must not exceed source fps");
    }
    if (target_size <= 0) {
        throw InvalidArgument("target size must be positive");
    }
}

std::vector<std::size_t> downsample_indices(double source_fps, double target_fps, std::size_t frame_count) {
    IngestConfig{source_fps, target_fps, 1}.validate();
    std::vector<std::size_t> kept;
    for (std::size_t k = 0;; ++k) {
        const std::size_t ordinal = kept_ordinal(k, source_fps, target_fps);
        if (ordinal >= frame_count) {
            break;
        }
        kept.push_back(ordinal);
    }
    return kept;
}

Letterbox Letterbox::fit(int source_width, int source_height, int target_size) {
    if (source_width <= 0 || source_height <= 0) {
        throw MediaError("zero-area frame");
    }
    if (target_size <= 0) {
        throw InvalidArgument("target size must be positive");
    }
    Letterbox lb;
    lb.source_width = source_width;
    lb.source_height = source_height;
    lb.target_size = target_size;
    lb.scale = static_cast<double>(target_size) / static_cast<double>(std::max(source_width, source_height));
    lb.content_width = std::clamp(static_cast<int>(std::lround(source_width * lb.scale)), 1, target_size);
    lb.content_height = std::clamp(static_cast<int>(std::lround(source_height * lb.scale)), 1, target_size);
    lb.offset_x = (target_size - lb.content_width) / 2;
    lb.offset_y = (target_size - lb.content_height) / 2;
    return lb;
}

BoundingBox Letterbox::to_target(const BoundingBox& box) const noexcept {
    const double sx = static_cast<double>(content_width) / source_width;
    const double sy = static_cast<double>(content_height) / source_height;
    return {box.x * sx + offset_x, box.y * sy + offset_y, box.width * sx, box.height * sy};
}

double Letterbox::source_x(int x) const noexcept {
    return (x - offset_x + 0.5) * (static_cast<double>(source_width) / content_width) - 0.5;
}

double Letterbox::source_y(int y) const noexcept {
    return (y - offset_y + 0.5) * (static_cast<double>(source_height) / content_height) - 0.5;
}

Frame resize_frame(const Frame& frame, int target_size) {
    if (frame.image.empty() || frame.image.pixels.size() != static_cast<std::size_t>(frame.width()) * frame.height() * 3) {
        throw MediaError("malformed frame");
    }
    const Letterbox lb = Letterbox::fit(frame.width(), frame.height(), target_size);
    if (lb.identity()) {
        return frame;
    }
    const Image content = resize_bilinear(frame.image, lb.content_width, lb.content_height);
    Frame out{frame.index, frame.source_index, Image(target_size, target_size, 0)};
    const std::size_t row_bytes = static_cast<std::size_t>(content.width) * 3;
    for (int y = 0; y < content.height; ++y) {
        std::copy_n(content.at(0, y), row_bytes, out.image.at(lb.offset_x, lb.offset_y + y));
    }
    return out;
}

ImageDirectorySource::ImageDirectorySource(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
        throw MediaError("not a readable directory: " + dir.string());
    }
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) {
            files_.push_back(entry.path());
        }
    }
    if (ec) {
        throw MediaError("cannot list directory: " + dir.string());
    }
    std::sort(files_.begin(), files_.end(),
              [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
}

std::optional<Image> ImageDirectorySource::next() {
    if (cursor_ >= files_.size()) {
        return std::nullopt;
    }
    return read_image(files_[cursor_++]);
}

bool ImageDirectorySource::skip() {
    if (cursor_ >= files_.size()) {
        return false;
    }
    ++cursor_;
    return true;
}

RawRgbSource::RawRgbSource(std::istream& in, int width, int height) : in_(&in), width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
        throw InvalidArgument("raw geometry must be positive");
    }
}

std::optional<Image> RawRgbSource::next() {
    Image img(width_, height_);
    in_->read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    const auto got = in_->gcount();
    if (got == 0) {
        return std::nullopt;
    }
    if (static_cast<std::size_t>(got) != img.pixels.size()) {
        throw MediaError("truncated raw frame: got " + std::to_string(got) + " bytes");
    }
    return img;
}

MemorySource::MemorySource(std::vector<Image> frames) : frames_(std::move(frames)) {}

std::optional<Image> MemorySource::next() {
    if (cursor_ >= frames_.size()) {
        return std::nullopt;
    }
    return frames_[cursor_++];
}

bool MemorySource::skip() {
    if (cursor_ >= frames_.size()) {
        return false;
    }
    ++cursor_;
    return true;
}

FrameStream::FrameStream(std::unique_ptr<FrameSource> source, IngestConfig config)
    : source_(std::move(source)), config_(config) {
    config_.validate();
}

std::optional<Frame> FrameStream::next() {
    const std::size_t wanted = kept_ordinal(kept_, config_.source_fps, config_.target_fps);
    while (position_ < wanted) {
        if (!source_->skip()) {
            return std::nullopt;
        }
        ++position_;
    }
    auto img = source_->next();
    if (!img) {
        return std::nullopt;
    }
    Frame frame{kept_, position_, std::move(*img)};
    ++position_;
    ++kept_;
    return resize_frame(frame, config_.target_size);
}

std::pair<int, int> parse_geometry(const std::string& text) {
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) {
        throw InvalidArgument("geometry must look like WxH: " + text);
    }
    try {
        std::size_t used_w = 0;
        std::size_t used_h = 0;
        const int w = std::stoi(text.substr(0, x), &used_w);
        const int h = std::stoi(text.substr(x + 1), &used_h);
        if (used_w != x || used_h != text.size() - x - 1 || w <= 0 || h <= 0) {
            throw InvalidArgument("bad geometry: " + text);
        }
        return {w, h};
    } catch (const std::logic_error&) {
        throw InvalidArgument("bad geometry: " + text);
    }
}

}  // namespace plantdoctor

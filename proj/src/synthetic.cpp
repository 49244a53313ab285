#include "plantdoctor/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "plantdoctor/errors.hpp"
#include "plantdoctor/image_io.hpp"
#include "plantdoctor/report.hpp"
#include "text_util.hpp"

namespace plantdoctor::synthetic {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic value in [-1, 1] for an integer key tuple.
double noise(std::uint64_t seed, std::uint64_t a, std::int64_t x, std::int64_t y) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ static_cast<std::uint64_t>(x));
    h = splitmix64(h ^ static_cast<std::uint64_t>(y));
    return static_cast<double>(h >> 11) / static_cast<double>(1ULL << 53) * 2.0 - 1.0;
}

std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

struct LocalCoords {
    double s;
    double t;
};

LocalCoords to_local(const LeafSpec& leaf, int dx, int dy) {
    const double th = leaf.angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(th);
    const double s = std::sin(th);
    return {dx * c + dy * s, -dx * s + dy * c};
}

LeafRaster rasterize(const LeafSpec& leaf) {
    LeafRaster r;
    r.radius = static_cast<int>(std::ceil(std::max(leaf.semi_major, leaf.semi_minor))) + 1;
    const int side = 2 * r.radius + 1;
    r.leaf = BinaryMask(side, side);
    r.damage = BinaryMask(side, side);
    for (int dy = -r.radius; dy <= r.radius; ++dy) {
        for (int dx = -r.radius; dx <= r.radius; ++dx) {
            const LocalCoords p = to_local(leaf, dx, dy);
            const double e = (p.s / leaf.semi_major) * (p.s / leaf.semi_major) + (p.t / leaf.semi_minor) * (p.t / leaf.semi_minor);
            if (e > 1.0) {
                continue;
            }
            r.leaf.at(dx + r.radius, dy + r.radius) = 1;
            for (const DamageBlob& b : leaf.damage) {
                const double bx = b.rel_x * leaf.semi_major;
                const double by = b.rel_y * leaf.semi_minor;
                if ((p.s - bx) * (p.s - bx) + (p.t - by) * (p.t - by) <= b.radius * b.radius) {
                    r.damage.at(dx + r.radius, dy + r.radius) = 1;
                    break;
                }
            }
        }
    }
    return r;
}

// Leaf surface colour at leaf-local offset (dx, dy): radial shading, a midrib,
// slanted lateral veins and fixed per-pixel grain, all moving with the leaf.
Rgb leaf_color(const LeafSpec& leaf, std::uint64_t seed, int dx, int dy) {
    const LocalCoords p = to_local(leaf, dx, dy);
    const double r2 = (p.s / leaf.semi_major) * (p.s / leaf.semi_major) + (p.t / leaf.semi_minor) * (p.t / leaf.semi_minor);
    const double shade = 0.8 + 0.2 * (1.0 - r2);
    double vein = 0.0;
    if (std::abs(p.t) < 1.5) {
        vein += 40.0;
    } else {
        const double phase = (p.s - 0.8 * std::abs(p.t)) / 11.0;
        if (std::abs(phase - std::round(phase)) < 0.12) {
            vein += 25.0;
        }
    }
    const double grain = 14.0 * noise(seed, static_cast<std::uint64_t>(leaf.id_truth) + 1000, dx, dy);
    Rgb out{};
    for (std::size_t c = 0; c < 3; ++c) {
        out[c] = clamp_u8(leaf.color[c] * shade + vein * (c == 1 ? 1.0 : 0.6) + grain);
    }
    return out;
}

void box_blur_horizontal(Image& img, int radius) {
    if (radius <= 0) {
        return;
    }
    const Image src = img;
    const int taps = 2 * radius + 1;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                int acc = 0;
                for (int i = -radius; i <= radius; ++i) {
                    acc += src.at(std::clamp(x + i, 0, img.width - 1), y)[c];
                }
                img.at(x, y)[c] = static_cast<std::uint8_t>((acc + taps / 2) / taps);
            }
        }
    }
}

}  // namespace

std::pair<double, double> LeafSpec::center_at(std::size_t frame) const {
    if (!path.empty()) {
        return path[std::min(frame, path.size() - 1)];
    }
    return {start_x + velocity_x * static_cast<double>(frame), start_y + velocity_y * static_cast<double>(frame)};
}

bool LeafSpec::hidden_at(std::size_t frame) const {
    return std::any_of(occlusions.begin(), occlusions.end(), [frame](const FrameInterval& w) { return w.contains(frame); });
}

void SceneSpec::validate() const {
    if (width <= 0 || height <= 0) {
        throw InvalidArgument("scene size must be positive");
    }
    if (blur_radius < 0) {
        throw InvalidArgument("blur radius must be non-negative");
    }
    for (const LeafSpec& leaf : leaves) {
        if (!(leaf.semi_major > 0.0 && leaf.semi_minor > 0.0)) {
            throw InvalidArgument("leaf " + std::to_string(leaf.id_truth) + ": axes must be positive");
        }
        for (const DamageBlob& b : leaf.damage) {
            if (!(b.rel_x * b.rel_x + b.rel_y * b.rel_y < 1.0) || !(b.radius > 0.0)) {
                throw InvalidArgument("leaf " + std::to_string(leaf.id_truth) + ": damage blob must sit inside the leaf");
            }
        }
        for (const FrameInterval& w : leaf.occlusions) {
            if (w.first > w.last) {
                throw InvalidArgument("leaf " + std::to_string(leaf.id_truth) + ": empty occlusion window");
            }
        }
        if (leaf.flagged_confidence && !(*leaf.flagged_confidence >= 0.0 && *leaf.flagged_confidence <= 1.0)) {
            throw InvalidArgument("leaf " + std::to_string(leaf.id_truth) + ": confidence must lie in [0, 1]");
        }
    }
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        for (std::size_t j = i + 1; j < leaves.size(); ++j) {
            if (leaves[i].id_truth == leaves[j].id_truth) {
                throw InvalidArgument("duplicate leaf id " + std::to_string(leaves[i].id_truth));
            }
        }
    }
}

bool LeafRaster::leaf_at(int dx, int dy) const noexcept {
    if (std::abs(dx) > radius || std::abs(dy) > radius) {
        return false;
    }
    return leaf.at(dx + radius, dy + radius);
}

bool LeafRaster::damage_at(int dx, int dy) const noexcept {
    if (std::abs(dx) > radius || std::abs(dy) > radius) {
        return false;
    }
    return damage.at(dx + radius, dy + radius);
}

SceneRenderer::SceneRenderer(SceneSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    rasters_.reserve(spec_.leaves.size());
    for (const LeafSpec& leaf : spec_.leaves) {
        rasters_.push_back(rasterize(leaf));
    }
    std::vector<char> seen(spec_.leaves.size(), 0);
    for (std::size_t f = 0; f < spec_.frame_count; ++f) {
        for (const GroundTruthBox& b : boxes(f)) {
            for (std::size_t i = 0; i < spec_.leaves.size(); ++i) {
                if (spec_.leaves[i].id_truth == b.leaf_id) {
                    seen[i] = 1;
                }
            }
        }
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
            warnings_.push_back("leaf " + std::to_string(spec_.leaves[i].id_truth) + " is never inside the frame");
        }
    }
}

std::pair<int, int> SceneRenderer::rounded_center(std::size_t leaf, std::size_t frame) const {
    const auto [x, y] = spec_.leaves[leaf].center_at(frame);
    return {static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y))};
}

bool SceneRenderer::covers(std::size_t leaf, std::size_t frame, int x, int y) const {
    if (spec_.leaves[leaf].hidden_at(frame)) {
        return false;
    }
    const auto [cx, cy] = rounded_center(leaf, frame);
    return rasters_[leaf].leaf_at(x - cx, y - cy);
}

int SceneRenderer::owner(std::size_t frame, int x, int y) const {
    if (x < 0 || y < 0 || x >= spec_.width || y >= spec_.height) {
        return -1;
    }
    for (std::size_t i = spec_.leaves.size(); i-- > 0;) {
        if (covers(i, frame, x, y)) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

bool SceneRenderer::damaged(std::size_t leaf, std::size_t frame, int x, int y) const {
    const auto [cx, cy] = rounded_center(leaf, frame);
    return rasters_[leaf].damage_at(x - cx, y - cy);
}

Frame SceneRenderer::render(std::size_t frame) const {
    if (frame >= spec_.frame_count) {
        throw InvalidArgument("frame index beyond scene length");
    }
    Image img(spec_.width, spec_.height);
    for (int y = 0; y < spec_.height; ++y) {
        for (int x = 0; x < spec_.width; ++x) {
            const double g = 10.0 * x / spec_.width + 5.0 * noise(spec_.seed, 7, x, y);
            std::uint8_t* p = img.at(x, y);
            p[0] = clamp_u8(62 + g);
            p[1] = clamp_u8(54 + g);
            p[2] = clamp_u8(40 + g);
        }
    }
    for (std::size_t i = 0; i < spec_.leaves.size(); ++i) {
        const LeafSpec& leaf = spec_.leaves[i];
        if (leaf.hidden_at(frame)) {
            continue;
        }
        const LeafRaster& r = rasters_[i];
        const auto [cx, cy] = rounded_center(i, frame);
        for (int dy = -r.radius; dy <= r.radius; ++dy) {
            const int y = cy + dy;
            if (y < 0 || y >= spec_.height) {
                continue;
            }
            for (int dx = -r.radius; dx <= r.radius; ++dx) {
                const int x = cx + dx;
                if (x < 0 || x >= spec_.width || !r.leaf_at(dx, dy)) {
                    continue;
                }
                std::uint8_t* p = img.at(x, y);
                if (r.damage_at(dx, dy)) {
                    const DamageBlob* blob = nullptr;
                    const LocalCoords lc = to_local(leaf, dx, dy);
                    for (const DamageBlob& b : leaf.damage) {
                        const double bx = b.rel_x * leaf.semi_major;
                        const double by = b.rel_y * leaf.semi_minor;
                        if ((lc.s - bx) * (lc.s - bx) + (lc.t - by) * (lc.t - by) <= b.radius * b.radius) {
                            blob = &b;
                            break;
                        }
                    }
                    const double grain = 8.0 * noise(spec_.seed, static_cast<std::uint64_t>(leaf.id_truth) + 5000, dx, dy);
                    for (std::size_t c = 0; c < 3; ++c) {
                        p[c] = clamp_u8(blob->color[c] + grain);
                    }
                } else {
                    const Rgb col = leaf_color(leaf, spec_.seed, dx, dy);
                    std::copy(col.begin(), col.end(), p);
                }
            }
        }
    }
    if (std::find(spec_.blur_frames.begin(), spec_.blur_frames.end(), frame) != spec_.blur_frames.end()) {
        box_blur_horizontal(img, spec_.blur_radius);
    }
    return Frame{frame, frame, std::move(img)};
}

std::vector<GroundTruthBox> SceneRenderer::boxes(std::size_t frame) const {
    std::vector<GroundTruthBox> out;
    for (std::size_t i = 0; i < spec_.leaves.size(); ++i) {
        const LeafSpec& leaf = spec_.leaves[i];
        if (leaf.hidden_at(frame)) {
            continue;
        }
        const LeafRaster& r = rasters_[i];
        const auto [cx, cy] = rounded_center(i, frame);
        int x0 = spec_.width;
        int y0 = spec_.height;
        int x1 = -1;
        int y1 = -1;
        for (int dy = -r.radius; dy <= r.radius; ++dy) {
            const int y = cy + dy;
            if (y < 0 || y >= spec_.height) {
                continue;
            }
            for (int dx = -r.radius; dx <= r.radius; ++dx) {
                const int x = cx + dx;
                if (x >= 0 && x < spec_.width && r.leaf_at(dx, dy)) {
                    x0 = std::min(x0, x);
                    x1 = std::max(x1, x);
                    y0 = std::min(y0, y);
                    y1 = std::max(y1, y);
                }
            }
        }
        if (x1 < 0) {
            continue;
        }
        out.push_back({leaf.id_truth, PixelRect{x0, y0, x1 - x0 + 1, y1 - y0 + 1}, leaf.flagged_confidence.value_or(1.0)});
    }
    return out;
}

std::vector<LeafTruth> SceneRenderer::truth() const {
    std::vector<LeafTruth> out;
    for (std::size_t i = 0; i < spec_.leaves.size(); ++i) {
        out.push_back({spec_.leaves[i].id_truth, rasters_[i].leaf.count(), rasters_[i].damage.count()});
    }
    return out;
}

RenderedScene render(const SceneSpec& spec) {
    const SceneRenderer scene(spec);
    RenderedScene out;
    for (std::size_t f = 0; f < scene.frame_count(); ++f) {
        out.frames.push_back(scene.render(f));
        out.boxes.push_back(scene.boxes(f));
    }
    out.truth = scene.truth();
    return out;
}

OracleDetector::OracleDetector(std::shared_ptr<const SceneRenderer> scene, int target_size)
    : scene_(std::move(scene)),
      letterbox_(Letterbox::fit(scene_->spec().width, scene_->spec().height, target_size)) {}

std::vector<Detection> OracleDetector::infer(const Frame& frame) const {
    if (frame.source_index >= scene_->frame_count()) {
        throw BackendError("oracle detector: frame " + std::to_string(frame.source_index) + " is not part of the scene");
    }
    std::vector<Detection> out;
    for (const GroundTruthBox& gt : scene_->boxes(frame.source_index)) {
        const BoundingBox box{static_cast<double>(gt.box.x), static_cast<double>(gt.box.y),
                              static_cast<double>(gt.box.width), static_cast<double>(gt.box.height)};
        out.push_back({letterbox_.to_target(box), gt.confidence, frame.index});
    }
    return out;
}

OracleSegmenter::OracleSegmenter(std::shared_ptr<const SceneRenderer> scene, int target_size)
    : scene_(std::move(scene)),
      letterbox_(Letterbox::fit(scene_->spec().width, scene_->spec().height, target_size)) {}

ProbabilityMap OracleSegmenter::predict(const Image& roi, const RoiContext& ctx, MaskClass cls) const {
    if (roi.width != ctx.region.width || roi.height != ctx.region.height) {
        throw BackendError("oracle segmenter: ROI does not match its region");
    }
    if (ctx.source_index >= scene_->frame_count()) {
        throw BackendError("oracle segmenter: frame is not part of the scene");
    }
    const std::size_t n = static_cast<std::size_t>(roi.width) * static_cast<std::size_t>(roi.height);
    std::vector<int> owners(n, -1);
    std::vector<std::pair<int, int>> source(n);
    std::vector<std::size_t> votes(scene_->spec().leaves.size(), 0);
    for (int y = 0; y < roi.height; ++y) {
        const int sy = static_cast<int>(std::floor(letterbox_.source_y(ctx.region.y + y) + 0.5));
        for (int x = 0; x < roi.width; ++x) {
            const int sx = static_cast<int>(std::floor(letterbox_.source_x(ctx.region.x + x) + 0.5));
            const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(roi.width) + static_cast<std::size_t>(x);
            source[i] = {sx, sy};
            owners[i] = scene_->owner(ctx.source_index, sx, sy);
            if (owners[i] >= 0) {
                ++votes[static_cast<std::size_t>(owners[i])];
            }
        }
    }
    ProbabilityMap out{roi.width, roi.height, std::vector<float>(n, 0.0F)};
    const auto winner = std::max_element(votes.begin(), votes.end());
    if (winner == votes.end() || *winner == 0) {
        return out;
    }
    const auto leaf = static_cast<int>(winner - votes.begin());
    for (std::size_t i = 0; i < n; ++i) {
        if (owners[i] != leaf) {
            continue;
        }
        const bool hit = cls == MaskClass::leaf ||
                         scene_->damaged(static_cast<std::size_t>(leaf), ctx.source_index, source[i].first, source[i].second);
        out.values[i] = hit ? 1.0F : 0.0F;
    }
    return out;
}

SceneSpec parse_scene_spec(std::istream& in) {
    SceneSpec spec;
    spec.leaves.clear();
    LeafSpec* leaf = nullptr;
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw InvalidArgument("scene spec line " + std::to_string(lineno) + ": " + msg);
    };
    auto rgb = [&](std::string_view v) {
        const auto c = text::parse_doubles(v, "color", 3);
        Rgb out{};
        for (std::size_t i = 0; i < 3; ++i) {
            if (c[i] < 0 || c[i] > 255) {
                fail("colour components must lie in [0, 255]");
            }
            out[i] = static_cast<std::uint8_t>(c[i]);
        }
        return out;
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s = text::trim(line);
        if (const auto hash = s.find('#'); hash != std::string_view::npos) {
            s = text::trim(s.substr(0, hash));
        }
        if (s.empty()) {
            continue;
        }
        if (s == "[leaf]") {
            spec.leaves.emplace_back();
            leaf = &spec.leaves.back();
            leaf->id_truth = static_cast<int>(spec.leaves.size());
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) {
            fail("expected key = value");
        }
        const std::string key(text::trim(s.substr(0, eq)));
        const std::string_view value = text::trim(s.substr(eq + 1));
        try {
            if (leaf == nullptr) {
                if (key == "seed") {
                    spec.seed = static_cast<std::uint64_t>(text::parse_int(value, key));
                } else if (key == "frames") {
                    spec.frame_count = static_cast<std::size_t>(text::parse_int(value, key));
                } else if (key == "size") {
                    const auto [w, h] = parse_geometry(std::string(value));
                    spec.width = w;
                    spec.height = h;
                } else if (key == "blur_frames") {
                    spec.blur_frames.clear();
                    if (!value.empty()) {
                        for (auto part : text::split(value, ',')) {
                            spec.blur_frames.push_back(static_cast<std::size_t>(text::parse_int(part, key)));
                        }
                    }
                } else if (key == "blur_radius") {
                    spec.blur_radius = static_cast<int>(text::parse_int(value, key));
                } else {
                    fail("unknown scene key '" + key + "'");
                }
                continue;
            }
            if (key == "id") {
                leaf->id_truth = static_cast<int>(text::parse_int(value, key));
            } else if (key == "axes") {
                const auto a = text::parse_doubles(value, key, 2);
                leaf->semi_major = a[0];
                leaf->semi_minor = a[1];
            } else if (key == "angle") {
                leaf->angle_deg = text::parse_double(value, key);
            } else if (key == "color") {
                leaf->color = rgb(value);
            } else if (key == "start") {
                const auto a = text::parse_doubles(value, key, 2);
                leaf->start_x = a[0];
                leaf->start_y = a[1];
            } else if (key == "velocity") {
                const auto a = text::parse_doubles(value, key, 2);
                leaf->velocity_x = a[0];
                leaf->velocity_y = a[1];
            } else if (key == "path") {
                leaf->path.clear();
                for (auto point : text::split(value, ';')) {
                    const auto a = text::parse_doubles(point, key, 2);
                    leaf->path.emplace_back(a[0], a[1]);
                }
            } else if (key == "damage") {
                const auto a = text::parse_doubles(value, key, 6);
                DamageBlob b;
                b.rel_x = a[0];
                b.rel_y = a[1];
                b.radius = a[2];
                for (std::size_t c = 0; c < 3; ++c) {
                    if (a[3 + c] < 0 || a[3 + c] > 255) {
                        fail("colour components must lie in [0, 255]");
                    }
                    b.color[c] = static_cast<std::uint8_t>(a[3 + c]);
                }
                leaf->damage.push_back(b);
            } else if (key == "occlude") {
                const auto dash = value.find('-');
                FrameInterval w;
                if (dash == std::string_view::npos) {
                    w.first = w.last = static_cast<std::size_t>(text::parse_int(value, key));
                } else {
                    w.first = static_cast<std::size_t>(text::parse_int(value.substr(0, dash), key));
                    w.last = static_cast<std::size_t>(text::parse_int(value.substr(dash + 1), key));
                }
                leaf->occlusions.push_back(w);
            } else if (key == "confidence") {
                leaf->flagged_confidence = text::parse_double(value, key);
            } else {
                fail("unknown leaf key '" + key + "'");
            }
        } catch (const InvalidArgument& e) {
            const std::string msg = e.what();
            if (msg.rfind("scene spec line", 0) == 0) {
                throw;
            }
            fail(msg);
        }
    }
    spec.validate();
    return spec;
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw MediaError("cannot open scene spec: " + path.string());
    }
    return parse_scene_spec(in);
}

std::string format_scene_spec(const SceneSpec& spec) {
    using text::format_double;
    std::ostringstream os;
    os << "seed = " << spec.seed << '\n';
    os << "frames = " << spec.frame_count << '\n';
    os << "size = " << spec.width << 'x' << spec.height << '\n';
    if (!spec.blur_frames.empty()) {
        os << "blur_frames = ";
        for (std::size_t i = 0; i < spec.blur_frames.size(); ++i) {
            os << (i ? "," : "") << spec.blur_frames[i];
        }
        os << '\n';
    }
    os << "blur_radius = " << spec.blur_radius << '\n';
    for (const LeafSpec& leaf : spec.leaves) {
        os << "\n[leaf]\n";
        os << "id = " << leaf.id_truth << '\n';
        os << "axes = " << format_double(leaf.semi_major) << ',' << format_double(leaf.semi_minor) << '\n';
        os << "angle = " << format_double(leaf.angle_deg) << '\n';
        os << "color = " << +leaf.color[0] << ',' << +leaf.color[1] << ',' << +leaf.color[2] << '\n';
        os << "start = " << format_double(leaf.start_x) << ',' << format_double(leaf.start_y) << '\n';
        os << "velocity = " << format_double(leaf.velocity_x) << ',' << format_double(leaf.velocity_y) << '\n';
        if (!leaf.path.empty()) {
            os << "path = ";
            for (std::size_t i = 0; i < leaf.path.size(); ++i) {
                os << (i ? ";" : "") << format_double(leaf.path[i].first) << ',' << format_double(leaf.path[i].second);
            }
            os << '\n';
        }
        for (const DamageBlob& b : leaf.damage) {
            os << "damage = " << format_double(b.rel_x) << ',' << format_double(b.rel_y) << ','
               << format_double(b.radius) << ',' << +b.color[0] << ',' << +b.color[1] << ',' << +b.color[2] << '\n';
        }
        for (const FrameInterval& w : leaf.occlusions) {
            os << "occlude = " << w.first << '-' << w.last << '\n';
        }
        if (leaf.flagged_confidence) {
            os << "confidence = " << format_double(*leaf.flagged_confidence) << '\n';
        }
    }
    return os.str();
}

void write_scene(const SceneSpec& spec, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    const SceneRenderer scene(spec);
    std::error_code ec;
    fs::create_directories(out_dir / "frames", ec);
    fs::create_directories(out_dir / "masks", ec);
    if (ec) {
        throw MediaError("cannot create output directory: " + out_dir.string());
    }
    {
        std::ofstream os(out_dir / kSceneFileName, std::ios::binary);
        os << format_scene_spec(spec);
        if (!os) {
            throw MediaError("cannot write scene spec");
        }
    }
    std::ofstream gt(out_dir / "ground_truth.tsv", std::ios::binary);
    gt << "frame\tleaf_id\tx\ty\tw\th\tconfidence\n";
    std::vector<std::optional<std::size_t>> first_seen(spec.leaves.size());
    for (std::size_t f = 0; f < scene.frame_count(); ++f) {
        char name[32];
        std::snprintf(name, sizeof name, "%06zu.png", f);
        write_png(out_dir / "frames" / name, scene.render(f).image);
        for (const GroundTruthBox& b : scene.boxes(f)) {
            gt << f << '\t' << b.leaf_id << '\t' << b.box.x << '\t' << b.box.y << '\t' << b.box.width << '\t'
               << b.box.height << '\t' << text::format_double(b.confidence) << '\n';
            for (std::size_t i = 0; i < spec.leaves.size(); ++i) {
                if (spec.leaves[i].id_truth == b.leaf_id && !first_seen[i]) {
                    first_seen[i] = f;
                }
            }
        }
    }
    if (!gt) {
        throw MediaError("cannot write ground truth table");
    }
    std::vector<LeafReport> rows;
    const auto truth = scene.truth();
    for (std::size_t i = 0; i < truth.size(); ++i) {
        LeafReport r;
        r.leaf_id = static_cast<TrackId>(truth[i].leaf_id);
        r.best_frame = first_seen[i].value_or(0);
        r.leaf_area_px = truth[i].leaf_area_px;
        r.damage_area_px = truth[i].damage_area_px;
        r.ratio_pct = truth[i].ratio_pct();
        rows.push_back(r);
        write_png(out_dir / "masks" / ("leaf_" + std::to_string(truth[i].leaf_id) + ".png"), scene.raster(i).leaf);
        write_png(out_dir / "masks" / ("damage_" + std::to_string(truth[i].leaf_id) + ".png"), scene.raster(i).damage);
    }
    std::sort(rows.begin(), rows.end(), [](const LeafReport& a, const LeafReport& b) { return a.leaf_id < b.leaf_id; });
    write_csv(rows, out_dir / "truth.csv");
}

}  // namespace plantdoctor::synthetic

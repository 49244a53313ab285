#include "plantdoctor/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "plantdoctor/errors.hpp"
#include "plantdoctor/image_io.hpp"
#include "plantdoctor/onnx_backend.hpp"
#include "plantdoctor/parallel.hpp"
#include "plantdoctor/synthetic.hpp"
#include "text_util.hpp"

namespace plantdoctor {

namespace fs = std::filesystem;

namespace {

constexpr const char* kModelPrefix = "model:";

std::shared_ptr<const synthetic::SceneRenderer> load_oracle_scene(const RunConfig& cfg) {
    std::vector<fs::path> candidates;
    if (cfg.oracle_scene) {
        candidates.push_back(*cfg.oracle_scene);
    } else if (cfg.input != "-" && !cfg.input.empty()) {
        const fs::path in(cfg.input);
        candidates.push_back(in / synthetic::kSceneFileName);
        candidates.push_back(in.parent_path() / synthetic::kSceneFileName);
    }
    for (const fs::path& p : candidates) {
        std::error_code ec;
        if (fs::is_regular_file(p, ec)) {
            try {
                return std::make_shared<const synthetic::SceneRenderer>(synthetic::load_scene_spec(p));
            } catch (const Error& e) {
                throw BackendError("oracle scene " + p.string() + ": " + e.what());
            }
        }
    }
    throw BackendError("oracle backend needs a scene description (" + std::string(synthetic::kSceneFileName) +
                       " next to the input, or oracle.scene)");
}

std::string model_path(const std::string& spec) { return spec.substr(std::string(kModelPrefix).size()); }

std::string frame_name(std::size_t frame) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06zu.png", frame);
    return buf;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw MediaError("cannot create directory " + dir.string());
    }
}

// Per-track entries and the frame -> source ordinal map collected while tracking.
struct Collected {
    std::map<TrackId, RoiStack> stacks;
    std::map<std::size_t, std::size_t> source_of;
};

void collect_frame(const Frame& frame, const std::vector<TrackedDetection>& matched, Collected& out) {
    out.source_of[frame.index] = frame.source_index;
    for (const TrackedDetection& td : matched) {
        const auto region = roi_region(td.detection.bbox, frame.width(), frame.height());
        if (!region) {
            continue;
        }
        RoiEntry e;
        e.track_id = td.track_id;
        e.frame_index = frame.index;
        e.region = *region;
        e.roi = crop(frame.image, *region);
        RoiStack& stack = out.stacks[td.track_id];
        stack.track_id = td.track_id;
        stack.entries.push_back(std::move(e));
    }
}

std::vector<RoiStack> remap_stacks(std::map<TrackId, RoiStack> stacks, const IdRemap& remap) {
    std::map<TrackId, RoiStack> merged;
    for (auto& [id, stack] : stacks) {
        const auto it = remap.find(id);
        const TrackId target = it == remap.end() ? id : it->second;
        RoiStack& dst = merged[target];
        dst.track_id = target;
        for (RoiEntry& e : stack.entries) {
            e.track_id = target;
            dst.entries.push_back(std::move(e));
        }
    }
    std::vector<RoiStack> out;
    out.reserve(merged.size());
    for (auto& [id, stack] : merged) {
        std::stable_sort(stack.entries.begin(), stack.entries.end(),
                         [](const RoiEntry& a, const RoiEntry& b) { return a.frame_index < b.frame_index; });
        out.push_back(std::move(stack));
    }
    return out;
}

}  // namespace

Backends load_backends(const RunConfig& cfg) {
    Backends b;
    std::shared_ptr<const synthetic::SceneRenderer> scene;
    auto oracle_scene = [&] {
        if (!scene) {
            scene = load_oracle_scene(cfg);
        }
        return scene;
    };
    const int size = cfg.ingest.target_size;
    if (cfg.detector_backend == "oracle") {
        b.detector = std::make_shared<synthetic::OracleDetector>(oracle_scene(), size);
    } else if (cfg.detector_backend.rfind(kModelPrefix, 0) == 0) {
        b.detector = std::make_shared<OnnxDetector>(model_path(cfg.detector_backend), size);
    } else {
        throw InvalidArgument("unknown detector backend '" + cfg.detector_backend + "'");
    }
    if (cfg.segmenter_backend == "oracle") {
        b.segmenter = std::make_shared<synthetic::OracleSegmenter>(oracle_scene(), size);
    } else if (cfg.segmenter_backend.rfind(kModelPrefix, 0) == 0) {
        b.segmenter = std::make_shared<OnnxSegmenter>(model_path(cfg.segmenter_backend));
    } else {
        throw InvalidArgument("unknown segmenter backend '" + cfg.segmenter_backend + "'");
    }
    return b;
}

std::unique_ptr<FrameSource> open_input(const RunConfig& cfg, std::istream& stdin_stream) {
    if (cfg.input.empty()) {
        throw InvalidArgument("no input given");
    }
    if (cfg.input == "-") {
        if (!cfg.raw_geometry) {
            throw InvalidArgument("reading frames from standard input requires --raw-geometry WxH");
        }
        return std::make_unique<RawRgbSource>(stdin_stream, cfg.raw_geometry->first, cfg.raw_geometry->second);
    }
    fs::path dir(cfg.input);
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw MediaError("input is not a readable frame directory: " + dir.string());
    }
    if (fs::is_directory(dir / "frames", ec)) {
        dir /= "frames";
    }
    return std::make_unique<ImageDirectorySource>(dir);
}

PipelineResult run_pipeline(FrameStream& stream, const Backends& backends, const RunConfig& cfg,
                            std::size_t workers) {
    const Detector detector(backends.detector, cfg.detector);
    const Segmenter segmenter(backends.segmenter, cfg.segmenter);
    Tracker tracker(cfg.tracker);
    Collected collected;
    PipelineResult result;

    const std::size_t batch = std::max<std::size_t>(8, workers * 2);
    std::vector<Frame> frames;
    std::vector<std::vector<Detection>> dets;
    bool more = true;
    while (more) {
        frames.clear();
        while (frames.size() < batch) {
            auto f = stream.next();
            if (!f) {
                more = false;
                break;
            }
            frames.push_back(std::move(*f));
        }
        dets.assign(frames.size(), {});
        parallel_for(frames.size(), workers, [&](std::size_t i) { dets[i] = detector.detect(frames[i]); });
        for (std::size_t i = 0; i < frames.size(); ++i) {
            const Frame& frame = frames[i];
            const RoiProvider provider = [&frame](const BoundingBox& box) { return crop_roi(frame.image, box); };
            collect_frame(frame, tracker.step(frame.index, dets[i], provider), collected);
        }
        result.frames_processed += frames.size();
    }

    result.raw_histories = tracker.confirmed_histories();
    if (cfg.merge_enabled) {
        result.remap = merge_fragmented_tracks(result.raw_histories, cfg.merge);
    } else {
        for (const auto& [id, _] : result.raw_histories) {
            result.remap[id] = id;
        }
    }
    result.stacks = remap_stacks(std::move(collected.stacks), result.remap);

    const std::size_t n = result.stacks.size();
    std::vector<LeafReport> reports(n);
    std::vector<std::size_t> best(n);
    std::vector<LeafMasks> masks(n);
    parallel_for(n, workers, [&](std::size_t i) {
        RoiStack& stack = result.stacks[i];
        score_stack(stack);
        const RoiEntry& chosen = select_best(stack, cfg.similarity_floor);
        best[i] = static_cast<std::size_t>(&chosen - stack.entries.data());

        const RoiContext ctx{chosen.frame_index, collected.source_of.at(chosen.frame_index), chosen.region,
                             cfg.ingest.target_size, cfg.ingest.target_size};
        const Image prepared = preprocess(chosen.roi);
        masks[i].leaf = segmenter.segment_leaf(prepared, ctx);
        masks[i].damage = segmenter.segment_damage(prepared, ctx);
        const DamageAreas areas = damage_ratio(masks[i].leaf, masks[i].damage);

        LeafReport& r = reports[i];
        r.leaf_id = stack.track_id;
        r.best_frame = chosen.frame_index;
        if (areas.ratio_pct) {
            r.leaf_area_px = areas.leaf_area_px;
            r.damage_area_px = areas.damage_area_px;
            r.ratio_pct = areas.ratio_pct;
        }
    });
    for (std::size_t i = 0; i < n; ++i) {
        const TrackId id = result.stacks[i].track_id;
        result.best_ordinal[id] = best[i];
        result.masks[id] = std::move(masks[i]);
    }
    result.reports = std::move(reports);
    return result;
}

void dump_stacks(const PipelineResult& result, const fs::path& dir) {
    for (const RoiStack& stack : result.stacks) {
        const fs::path sub = dir / std::to_string(stack.track_id);
        ensure_dir(sub);
        std::ofstream tsv(sub / "scores.tsv", std::ios::binary | std::ios::trunc);
        if (!tsv) {
            throw MediaError("cannot write " + (sub / "scores.tsv").string());
        }
        tsv << "frame\tsimilarity\tsharpness\tscore\tbest\n";
        const std::size_t best = result.best_ordinal.at(stack.track_id);
        for (std::size_t k = 0; k < stack.entries.size(); ++k) {
            const RoiEntry& e = stack.entries[k];
            write_png(sub / frame_name(e.frame_index), e.roi);
            tsv << e.frame_index << '\t' << text::format_double(e.similarity) << '\t'
                << text::format_double(e.sharpness) << '\t' << text::format_double(e.score) << '\t'
                << (k == best ? 1 : 0) << '\n';
        }
    }
}

void dump_masks(const PipelineResult& result, const fs::path& dir) {
    ensure_dir(dir);
    for (const RoiStack& stack : result.stacks) {
        const std::string id = std::to_string(stack.track_id);
        const LeafMasks& m = result.masks.at(stack.track_id);
        write_png(dir / (id + "_leaf.png"), m.leaf);
        write_png(dir / (id + "_damage.png"), m.damage);

        // Best ROI with damage tinted red and the leaf outline dimmed outside.
        Image overlay = stack.entries.at(result.best_ordinal.at(stack.track_id)).roi;
        for (int y = 0; y < overlay.height; ++y) {
            for (int x = 0; x < overlay.width; ++x) {
                std::uint8_t* p = overlay.at(x, y);
                if (m.damage.at(x, y) && m.leaf.at(x, y)) {
                    p[0] = static_cast<std::uint8_t>((p[0] + 255) / 2);
                    p[1] = static_cast<std::uint8_t>(p[1] / 2);
                    p[2] = static_cast<std::uint8_t>(p[2] / 2);
                } else if (!m.leaf.at(x, y)) {
                    for (int c = 0; c < 3; ++c) {
                        p[c] = static_cast<std::uint8_t>(p[c] / 3);
                    }
                }
            }
        }
        write_png(dir / (id + "_best.png"), overlay);
    }
}

std::string summary_line(const std::vector<LeafReport>& reports) {
    double sum = 0.0;
    double max = 0.0;
    std::size_t with_ratio = 0;
    for (const LeafReport& r : reports) {
        if (r.ratio_pct) {
            sum += *r.ratio_pct;
            max = std::max(max, *r.ratio_pct);
            ++with_ratio;
        }
    }
    std::ostringstream os;
    os << "leaves found: " << reports.size() << ", mean damage ratio: "
       << (with_ratio ? text::format_fixed2(sum / static_cast<double>(with_ratio)) : std::string("n/a"))
       << "%, max damage ratio: " << (with_ratio ? text::format_fixed2(max) : std::string("n/a")) << '%';
    return os.str();
}

PipelineResult analyze(const RunConfig& cfg, std::istream& stdin_stream, std::ostream& csv_out) {
    cfg.validate();
    auto source = open_input(cfg, stdin_stream);
    const Backends backends = load_backends(cfg);
    FrameStream stream(std::move(source), cfg.resolved_ingest());
    PipelineResult result = run_pipeline(stream, backends, cfg, worker_count());

    if (cfg.dump_stacks) {
        dump_stacks(result, *cfg.dump_stacks);
    }
    if (cfg.dump_masks) {
        dump_masks(result, *cfg.dump_masks);
    }
    if (cfg.output_csv) {
        write_csv(result.reports, *cfg.output_csv);
    } else {
        csv_out << format_csv(result.reports);
        csv_out.flush();
    }
    return result;
}

}  // namespace plantdoctor

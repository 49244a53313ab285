#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "plantdoctor/config.hpp"
#include "plantdoctor/detection.hpp"
#include "plantdoctor/ingest.hpp"
#include "plantdoctor/report.hpp"
#include "plantdoctor/roi_selector.hpp"
#include "plantdoctor/segmentation.hpp"
#include "plantdoctor/track_merge.hpp"

namespace plantdoctor {

struct Backends {
    std::shared_ptr<const DetectorBackend> detector;
    std::shared_ptr<const SegmenterBackend> segmenter;
};

/// Instantiates the configured backends. Oracle backends read the scene
/// description from cfg.oracle_scene, or from the input directory or its
/// parent. Any failure is a BackendError.
[[nodiscard]] Backends load_backends(const RunConfig& cfg);

/// Frame source for cfg.input: raw RGB24 on `stdin_stream` for "-", otherwise
/// an image directory (its `frames/` subdirectory when present). MediaError
/// when the input cannot be opened.
[[nodiscard]] std::unique_ptr<FrameSource> open_input(const RunConfig& cfg, std::istream& stdin_stream);

struct LeafMasks {
    BinaryMask leaf;
    BinaryMask damage;
};

struct PipelineResult {
    std::vector<LeafReport> reports;  // sorted by leaf_id
    TrackHistories raw_histories;     // confirmed tracks before merging
    IdRemap remap;                    // identity when merging is disabled
    std::vector<RoiStack> stacks;     // post-merge, scored, sorted by track id
    std::map<TrackId, std::size_t> best_ordinal;  // index into the stack's entries
    std::map<TrackId, LeafMasks> masks;           // masks of the selected ROI
    std::size_t frames_processed = 0;
};

/// ingest -> detect -> track -> stack -> merge -> select -> preprocess ->
/// segment twice -> ratio. Detection and per-leaf segmentation run on up to
/// `workers` threads; tracking is sequential.
[[nodiscard]] PipelineResult run_pipeline(FrameStream& stream, const Backends& backends, const RunConfig& cfg,
                                          std::size_t workers);

/// Writes the per-track ROI crops and their scores under `dir/<id>/`.
void dump_stacks(const PipelineResult& result, const std::filesystem::path& dir);
/// Writes `<id>_leaf.png`, `<id>_damage.png` and `<id>_best.png` under `dir`.
void dump_masks(const PipelineResult& result, const std::filesystem::path& dir);

/// "leaves found: N, mean damage ratio: X%, max damage ratio: Y%".
[[nodiscard]] std::string summary_line(const std::vector<LeafReport>& reports);

/// Full `analyze` run: validates the config, opens input and backends, runs
/// the pipeline, writes artifacts and the CSV (stdout when no path is set).
[[nodiscard]] PipelineResult analyze(const RunConfig& cfg, std::istream& stdin_stream, std::ostream& csv_out);

}  // namespace plantdoctor

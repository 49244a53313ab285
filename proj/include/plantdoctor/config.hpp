#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "plantdoctor/detection.hpp"
#include "plantdoctor/ingest.hpp"
#include "plantdoctor/segmentation.hpp"
#include "plantdoctor/track_merge.hpp"
#include "plantdoctor/tracker.hpp"

namespace plantdoctor {

/// Everything one `analyze` run needs. `source_fps` stays empty until given;
/// an empty value means the footage is already at the target rate.
struct RunConfig {
    std::optional<double> source_fps;
    IngestConfig ingest;
    DetectorConfig detector;
    TrackerConfig tracker;
    MergeConfig merge;
    bool merge_enabled = true;
    double similarity_floor = 0.4;
    SegmenterConfig segmenter;

    std::string detector_backend = "oracle";   // "oracle" or "model:<path>"
    std::string segmenter_backend = "oracle";
    std::optional<std::pair<int, int>> raw_geometry;
    /// Scene description backing the oracle backends; looked up next to the
    /// input when empty.
    std::optional<std::filesystem::path> oracle_scene;

    std::string input;                           // path, or "-" for raw RGB on stdin
    std::optional<std::filesystem::path> output_csv;  // stdout when empty
    std::optional<std::filesystem::path> dump_stacks;
    std::optional<std::filesystem::path> dump_masks;

    /// Ingest settings with the source rate resolved.
    [[nodiscard]] IngestConfig resolved_ingest() const;

    void validate() const;
};

/// Sets one dotted key (`tracker.max_age`, `merge.enabled`, ...). Unknown keys
/// and unparsable values throw InvalidArgument.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Every key accepted by set_config_value, in a stable order.
[[nodiscard]] std::vector<std::string> config_keys();

/// Reads `key = value` lines. `[section]` headers prefix subsequent keys;
/// already-dotted keys are taken as is. `#` and `;` start comments.
void apply_config(RunConfig& cfg, std::istream& in);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

}  // namespace plantdoctor

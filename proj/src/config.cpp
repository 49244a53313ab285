#include "plantdoctor/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "plantdoctor/errors.hpp"
#include "text_util.hpp"

namespace plantdoctor {

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        return false;
    }
    throw InvalidArgument(key + ": expected a boolean, got '" + v + "'");
}

std::size_t parse_count(const std::string& v, const std::string& key) {
    const long long n = text::parse_int(v, key);
    if (n < 0) {
        throw InvalidArgument(key + " must not be negative");
    }
    return static_cast<std::size_t>(n);
}

int parse_small_int(const std::string& v, const std::string& key) {
    const long long n = text::parse_int(v, key);
    if (n < -1000000000LL || n > 1000000000LL) {
        throw InvalidArgument(key + " is out of range");
    }
    return static_cast<int>(n);
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"ingest.source_fps", [](RunConfig& c, const std::string& v) { c.source_fps = text::parse_double(v, "ingest.source_fps"); }},
        {"ingest.target_fps", [](RunConfig& c, const std::string& v) { c.ingest.target_fps = text::parse_double(v, "ingest.target_fps"); }},
        {"ingest.target_size", [](RunConfig& c, const std::string& v) { c.ingest.target_size = parse_small_int(v, "ingest.target_size"); }},
        {"ingest.raw_geometry", [](RunConfig& c, const std::string& v) { c.raw_geometry = parse_geometry(v); }},
        {"detector.backend", [](RunConfig& c, const std::string& v) { c.detector_backend = v; }},
        {"detector.confidence_floor", [](RunConfig& c, const std::string& v) { c.detector.confidence_floor = text::parse_double(v, "detector.confidence_floor"); }},
        {"detector.max_detections_per_frame", [](RunConfig& c, const std::string& v) { c.detector.max_detections_per_frame = parse_count(v, "detector.max_detections_per_frame"); }},
        {"tracker.n_init", [](RunConfig& c, const std::string& v) { c.tracker.n_init = parse_small_int(v, "tracker.n_init"); }},
        {"tracker.max_age", [](RunConfig& c, const std::string& v) { c.tracker.max_age = parse_small_int(v, "tracker.max_age"); }},
        {"tracker.gate_threshold", [](RunConfig& c, const std::string& v) { c.tracker.gate_threshold = text::parse_double(v, "tracker.gate_threshold"); }},
        {"tracker.lambda_motion", [](RunConfig& c, const std::string& v) { c.tracker.lambda_motion = text::parse_double(v, "tracker.lambda_motion"); }},
        {"tracker.appearance_gallery", [](RunConfig& c, const std::string& v) { c.tracker.appearance_gallery = parse_count(v, "tracker.appearance_gallery"); }},
        {"tracker.iou_threshold", [](RunConfig& c, const std::string& v) { c.tracker.iou_threshold = text::parse_double(v, "tracker.iou_threshold"); }},
        {"merge.enabled", [](RunConfig& c, const std::string& v) { c.merge_enabled = parse_bool(v, "merge.enabled"); }},
        {"merge.gap_max", [](RunConfig& c, const std::string& v) { c.merge.gap_max = parse_count(v, "merge.gap_max"); }},
        {"merge.dist_max", [](RunConfig& c, const std::string& v) { c.merge.dist_max = text::parse_double(v, "merge.dist_max"); }},
        {"merge.min_scale_ratio", [](RunConfig& c, const std::string& v) { c.merge.min_scale_ratio = text::parse_double(v, "merge.min_scale_ratio"); }},
        {"merge.max_scale_ratio", [](RunConfig& c, const std::string& v) { c.merge.max_scale_ratio = text::parse_double(v, "merge.max_scale_ratio"); }},
        {"merge.velocity_window", [](RunConfig& c, const std::string& v) { c.merge.velocity_window = parse_count(v, "merge.velocity_window"); }},
        {"selector.similarity_floor", [](RunConfig& c, const std::string& v) { c.similarity_floor = text::parse_double(v, "selector.similarity_floor"); }},
        {"segmenter.backend", [](RunConfig& c, const std::string& v) { c.segmenter_backend = v; }},
        {"segmenter.threshold", [](RunConfig& c, const std::string& v) { c.segmenter.binarization_threshold = text::parse_double(v, "segmenter.threshold"); }},
        {"oracle.scene", [](RunConfig& c, const std::string& v) { c.oracle_scene = v; }},
        {"output.csv", [](RunConfig& c, const std::string& v) { c.output_csv = v; }},
        {"output.dump_stacks", [](RunConfig& c, const std::string& v) { c.dump_stacks = v; }},
        {"output.dump_masks", [](RunConfig& c, const std::string& v) { c.dump_masks = v; }},
    };
    return table;
}

void validate_backend(const std::string& spec, const char* what) {
    if (spec == "oracle") {
        return;
    }
    if (spec.rfind("model:", 0) == 0 && spec.size() > 6) {
        return;
    }
    throw InvalidArgument(std::string(what) + " must be 'oracle' or 'model:<path>', got '" + spec + "'");
}

}  // namespace

IngestConfig RunConfig::resolved_ingest() const {
    IngestConfig out = ingest;
    out.source_fps = source_fps.value_or(ingest.target_fps);
    return out;
}

void RunConfig::validate() const {
    resolved_ingest().validate();
    detector.validate();
    tracker.validate();
    merge.validate();
    segmenter.validate();
    if (!(similarity_floor >= -1.0 && similarity_floor <= 1.0)) {
        throw InvalidArgument("selector.similarity_floor must lie in [-1, 1]");
    }
    validate_backend(detector_backend, "detector backend");
    validate_backend(segmenter_backend, "segmenter backend");
    if (raw_geometry && (raw_geometry->first <= 0 || raw_geometry->second <= 0)) {
        throw InvalidArgument("raw geometry must be positive");
    }
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) {
        throw InvalidArgument("unknown configuration key '" + key + "'");
    }
    it->second(cfg, value);
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& [k, _] : setters()) {
        keys.push_back(k);
    }
    return keys;
}

void apply_config(RunConfig& cfg, std::istream& in) {
    std::string raw;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = text::trim(line);
        if (line.empty()) {
            continue;
        }
        const std::string where = "config line " + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw InvalidArgument(where + ": malformed section header");
            }
            section = std::string(text::trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw InvalidArgument(where + ": expected key = value");
        }
        std::string key(text::trim(line.substr(0, eq)));
        const std::string value(text::trim(line.substr(eq + 1)));
        if (key.find('.') == std::string::npos && !section.empty()) {
            key = section + "." + key;
        }
        try {
            set_config_value(cfg, key, value);
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(where + ": " + e.what());
        }
    }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot read config file " + path.string());
    }
    apply_config(cfg, in);
}

}  // namespace plantdoctor

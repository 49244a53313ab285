#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "plantdoctor/config.hpp"
#include "plantdoctor/errors.hpp"
#include "plantdoctor/image_io.hpp"
#include "plantdoctor/metrics.hpp"
#include "plantdoctor/pipeline.hpp"
#include "plantdoctor/report.hpp"
#include "plantdoctor/synthetic.hpp"

namespace fs = std::filesystem;
using namespace plantdoctor;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitBackend = 3;
constexpr int kExitInternal = 4;

struct AnalyzeArgs {
    std::string input;
    double source_fps = 0.0;
    double target_fps = 3.0;
    int size = 640;
    std::string raw_geometry;
    std::string detector = "oracle";
    std::string segmenter = "oracle";
    std::string config;
    std::string scene;
    std::string output;
    std::string dump_stacks;
    std::string dump_masks;
    std::vector<std::string> overrides;
    bool no_merge = false;
};

struct Options {
    CLI::Option* source_fps = nullptr;
    CLI::Option* target_fps = nullptr;
    CLI::Option* size = nullptr;
    CLI::Option* raw_geometry = nullptr;
    CLI::Option* detector = nullptr;
    CLI::Option* segmenter = nullptr;
    CLI::Option* scene = nullptr;
    CLI::Option* output = nullptr;
    CLI::Option* dump_stacks = nullptr;
    CLI::Option* dump_masks = nullptr;
};

// Config file first, then every flag given on the command line on top of it.
RunConfig build_config(const AnalyzeArgs& a, const Options& o) {
    RunConfig cfg;
    if (!a.config.empty()) {
        apply_config_file(cfg, a.config);
    }
    for (const std::string& kv : a.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument("--set expects key=value, got '" + kv + "'");
        }
        set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.input = a.input;
    if (o.source_fps->count()) {
        cfg.source_fps = a.source_fps;
    }
    if (o.target_fps->count()) {
        cfg.ingest.target_fps = a.target_fps;
    }
    if (o.size->count()) {
        cfg.ingest.target_size = a.size;
    }
    if (o.raw_geometry->count()) {
        cfg.raw_geometry = parse_geometry(a.raw_geometry);
    }
    if (o.detector->count()) {
        cfg.detector_backend = a.detector;
    }
    if (o.segmenter->count()) {
        cfg.segmenter_backend = a.segmenter;
    }
    if (o.scene->count()) {
        cfg.oracle_scene = a.scene;
    }
    if (o.output->count()) {
        cfg.output_csv = a.output;
    }
    if (o.dump_stacks->count()) {
        cfg.dump_stacks = a.dump_stacks;
    }
    if (o.dump_masks->count()) {
        cfg.dump_masks = a.dump_masks;
    }
    if (a.no_merge) {
        cfg.merge_enabled = false;
    }
    return cfg;
}

int run_analyze(const AnalyzeArgs& a, const Options& o) {
    const RunConfig cfg = build_config(a, o);
    const PipelineResult result = analyze(cfg, std::cin, std::cout);
    std::cerr << summary_line(result.reports) << '\n';
    return 0;
}

int run_synth(const std::string& spec_path, const std::string& out) {
    const synthetic::SceneSpec spec = synthetic::load_scene_spec(spec_path);
    synthetic::write_scene(spec, out);
    const synthetic::SceneRenderer scene(spec);
    for (const std::string& w : scene.warnings()) {
        std::cerr << "warning: " << w << '\n';
    }
    std::cerr << "wrote " << spec.frame_count << " frames and " << spec.leaves.size() << " leaves to " << out << '\n';
    return 0;
}

int run_eval(const std::string& pred_dir, const std::string& truth_dir) {
    for (const std::string& d : {pred_dir, truth_dir}) {
        if (!fs::is_directory(d)) {
            throw MediaError("not a directory: " + d);
        }
    }
    std::vector<fs::path> preds;
    for (const auto& entry : fs::directory_iterator(pred_dir)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) {
            preds.push_back(entry.path());
        }
    }
    std::sort(preds.begin(), preds.end());
    std::printf("image\tiou\tdice\n");
    double iou_sum = 0.0;
    double dice_sum = 0.0;
    std::size_t n = 0;
    for (const fs::path& p : preds) {
        const fs::path t = fs::path(truth_dir) / p.filename();
        if (!fs::is_regular_file(t)) {
            std::printf("# unmatched\t%s\n", p.filename().string().c_str());
            continue;
        }
        const BinaryMask pm = read_mask(p);
        const BinaryMask tm = read_mask(t);
        const double i = metrics::mask_iou(pm, tm);
        const double d = metrics::dice(pm, tm);
        std::printf("%s\t%.4f\t%.4f\n", p.filename().string().c_str(), i, d);
        iou_sum += i;
        dice_sum += d;
        ++n;
    }
    if (n > 0) {
        std::printf("mean\t%.4f\t%.4f\n", iou_sum / static_cast<double>(n), dice_sum / static_cast<double>(n));
    } else {
        std::printf("mean\t\t\n");
    }
    return 0;
}

int run_compare(const std::string& software, const std::string& manual) {
    const Comparison cmp = compare_annotations(read_csv(software), read_csv(manual));
    std::cout << format_comparison(cmp);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Per-leaf damage analysis of plant footage"};
    app.require_subcommand(1);

    AnalyzeArgs a;
    Options o;
    CLI::App* analyze_cmd = app.add_subcommand("analyze", "Detect, track and quantify damage per leaf; CSV to stdout or --output");
    analyze_cmd->add_option("--input", a.input, "Frame directory, or - for raw RGB24 on stdin")->required();
    o.source_fps = analyze_cmd->add_option("--source-fps", a.source_fps, "Frame rate of the input (default: target rate)");
    o.target_fps = analyze_cmd->add_option("--target-fps", a.target_fps, "Frame rate after downsampling")->capture_default_str();
    o.size = analyze_cmd->add_option("--size", a.size, "Side of the square normalized frame")->capture_default_str();
    o.raw_geometry = analyze_cmd->add_option("--raw-geometry", a.raw_geometry, "WxH of raw stdin frames");
    o.detector = analyze_cmd->add_option("--detector", a.detector, "oracle | model:<path.onnx>");
    o.segmenter = analyze_cmd->add_option("--segmenter", a.segmenter, "oracle | model:<path.onnx>");
    o.scene = analyze_cmd->add_option("--scene", a.scene, "Scene description backing the oracle backends");
    o.output = analyze_cmd->add_option("--output,-o", a.output, "CSV path (default: stdout)");
    o.dump_stacks = analyze_cmd->add_option("--dump-stacks", a.dump_stacks, "Write per-leaf ROI stacks and scores here");
    o.dump_masks = analyze_cmd->add_option("--dump-masks", a.dump_masks, "Write best-ROI masks and overlays here");
    analyze_cmd->add_option("--config", a.config, "key = value configuration file");
    analyze_cmd->add_option("--set", a.overrides, "Override one configuration key (key=value)");
    analyze_cmd->add_flag("--no-merge", a.no_merge, "Keep fragmented tracks apart");

    std::string spec_path;
    std::string out_dir;
    CLI::App* synth_cmd = app.add_subcommand("synth", "Render a synthetic scene with ground truth");
    synth_cmd->add_option("--spec", spec_path, "Scene description file")->required();
    synth_cmd->add_option("--out", out_dir, "Output directory")->required();

    std::string pred_dir;
    std::string truth_dir;
    CLI::App* eval_cmd = app.add_subcommand("eval", "IoU and Dice of predicted masks against ground truth");
    eval_cmd->add_option("--pred", pred_dir, "Directory of predicted masks")->required();
    eval_cmd->add_option("--truth", truth_dir, "Directory of truth masks with matching names")->required();

    std::string software_csv;
    std::string manual_csv;
    CLI::App* compare_cmd = app.add_subcommand("compare", "Compare software ratios with manual annotation");
    compare_cmd->add_option("software", software_csv, "CSV produced by analyze")->required();
    compare_cmd->add_option("manual", manual_csv, "CSV of manual annotation")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (analyze_cmd->parsed()) {
            return run_analyze(a, o);
        }
        if (synth_cmd->parsed()) {
            return run_synth(spec_path, out_dir);
        }
        if (eval_cmd->parsed()) {
            return run_eval(pred_dir, truth_dir);
        }
        return run_compare(software_csv, manual_csv);
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const MediaError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const BackendError& e) {
        std::cerr << "backend error: " << e.what() << '\n';
        return kExitBackend;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

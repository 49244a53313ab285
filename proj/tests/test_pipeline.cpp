#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "plantdoctor/errors.hpp"
#include "plantdoctor/parallel.hpp"
#include "plantdoctor/pipeline.hpp"
#include "plantdoctor/synthetic.hpp"

using namespace plantdoctor;
namespace fs = std::filesystem;

namespace {

synthetic::SceneSpec small_scene(std::size_t frames) {
    synthetic::SceneSpec s;
    s.seed = 3;
    s.frame_count = frames;
    s.width = s.height = 320;
    for (int i = 0; i < 3; ++i) {
        synthetic::LeafSpec l;
        l.id_truth = i + 1;
        l.start_x = 60 + 100 * i;
        l.start_y = 100 + 50 * i;
        l.velocity_x = 1.0;
        l.velocity_y = 0.5 * i;
        l.semi_major = 30;
        l.semi_minor = 20;
        l.damage = {{0.2, 0.1, 3.0 + i, {150, 100, 50}}};
        s.leaves.push_back(l);
    }
    return s;
}

struct Harness {
    std::shared_ptr<const synthetic::SceneRenderer> scene;
    Backends backends;

    Harness(const synthetic::SceneSpec& spec, int size) : scene(std::make_shared<synthetic::SceneRenderer>(spec)) {
        backends.detector = std::make_shared<synthetic::OracleDetector>(scene, size);
        backends.segmenter = std::make_shared<synthetic::OracleSegmenter>(scene, size);
    }

    PipelineResult run(RunConfig cfg, std::size_t workers) const {
        std::vector<Image> images;
        for (std::size_t f = 0; f < scene->frame_count(); ++f) {
            images.push_back(scene->render(f).image);
        }
        FrameStream stream(std::make_unique<MemorySource>(std::move(images)), cfg.resolved_ingest());
        return run_pipeline(stream, backends, cfg, workers);
    }
};

RunConfig config_for(int size) {
    RunConfig cfg;
    cfg.ingest.target_size = size;
    return cfg;
}

}  // namespace

TEST_CASE("oracle pipeline recovers every leaf with its exact ratio") {
    const Harness h(small_scene(15), 320);
    const PipelineResult r = h.run(config_for(320), 1);
    const auto truth = h.scene->truth();
    REQUIRE(r.reports.size() == 3);
    CHECK(r.frames_processed == 15);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r.reports[i].leaf_id == i + 1);
        CHECK(*r.reports[i].leaf_area_px == truth[i].leaf_area_px);
        CHECK(*r.reports[i].damage_area_px == truth[i].damage_area_px);
        CHECK(std::abs(*r.reports[i].ratio_pct - truth[i].ratio_pct()) < 1e-9);
        CHECK(r.stacks[i].entries.size() == 13);  // confirmed from the third frame
    }
}

TEST_CASE("worker count does not change the result") {
    const Harness h(small_scene(12), 320);
    const auto one = h.run(config_for(320), 1);
    const auto many = h.run(config_for(320), 4);
    CHECK(format_csv(one.reports) == format_csv(many.reports));
}

TEST_CASE("an empty stream gives an empty report") {
    synthetic::SceneSpec s = small_scene(0);
    const Harness h(s, 320);
    const auto r = h.run(config_for(320), 2);
    CHECK(r.reports.empty());
    CHECK(format_csv(r.reports) == std::string(kCsvHeader) + "\n");
}

TEST_CASE("downsampling feeds source ordinals to the oracle") {
    const Harness h(small_scene(30), 320);
    RunConfig cfg = config_for(320);
    cfg.source_fps = 9.0;
    const auto r = h.run(cfg, 2);
    CHECK(r.frames_processed == 10);
    REQUIRE(r.reports.size() == 3);
    const auto truth = h.scene->truth();
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(*r.reports[i].ratio_pct == doctest::Approx(truth[i].ratio_pct()));
    }
}

TEST_CASE("letterboxed input still yields one row per leaf") {
    synthetic::SceneSpec s = small_scene(10);
    s.width = 480;
    s.height = 320;
    const Harness h(s, 240);
    const auto r = h.run(config_for(240), 2);
    REQUIRE(r.reports.size() == 3);
    const auto truth = h.scene->truth();
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(*r.reports[i].ratio_pct - truth[i].ratio_pct()) < 2.0);
    }
}

TEST_CASE("backend loading errors are backend errors") {
    RunConfig cfg;
    cfg.input = "/nonexistent";
    CHECK_THROWS_AS((void)load_backends(cfg), BackendError);
    cfg.oracle_scene = "/nonexistent/scene.spec";
    CHECK_THROWS_AS((void)load_backends(cfg), BackendError);
    RunConfig model;
    model.detector_backend = "model:/nonexistent/detector.onnx";
    model.oracle_scene = fs::path(PLANTDOCTOR_SCENES_DIR) / "clean10.spec";
    CHECK_THROWS_AS((void)load_backends(model), BackendError);
    model.detector_backend = "oracle";
    model.segmenter_backend = "model:/nonexistent/seg.onnx";
    CHECK_THROWS_AS((void)load_backends(model), BackendError);
    model.segmenter_backend = "oracle";
    CHECK_NOTHROW((void)load_backends(model));
}

TEST_CASE("input opening errors") {
    std::istringstream none;
    RunConfig cfg;
    CHECK_THROWS_AS((void)open_input(cfg, none), InvalidArgument);
    cfg.input = "-";
    CHECK_THROWS_AS((void)open_input(cfg, none), InvalidArgument);
    cfg.raw_geometry = std::pair{4, 4};
    CHECK_NOTHROW((void)open_input(cfg, none));
    cfg.input = "/nonexistent/frames";
    CHECK_THROWS_AS((void)open_input(cfg, none), MediaError);
}

TEST_CASE("analyze writes the csv, dumps and a summary") {
    const fs::path dir = fs::temp_directory_path() / "plantdoctor_test_analyze";
    fs::remove_all(dir);
    synthetic::write_scene(small_scene(8), dir / "scene");
    RunConfig cfg;
    cfg.input = (dir / "scene").string();
    cfg.ingest.target_size = 320;
    cfg.dump_stacks = dir / "stacks";
    cfg.dump_masks = dir / "masks";
    std::istringstream in;
    std::ostringstream csv;
    const PipelineResult r = analyze(cfg, in, csv);
    CHECK(csv.str() == format_csv(r.reports));
    CHECK(r.reports.size() == 3);
    CHECK(fs::exists(dir / "stacks" / "1" / "scores.tsv"));
    CHECK(fs::exists(dir / "stacks" / "1" / "000002.png"));
    CHECK(fs::exists(dir / "masks" / "2_leaf.png"));
    CHECK(fs::exists(dir / "masks" / "2_damage.png"));
    CHECK(fs::exists(dir / "masks" / "2_best.png"));

    cfg.output_csv = dir / "out.csv";
    std::ostringstream unused;
    (void)analyze(cfg, in, unused);
    CHECK(unused.str().empty());
    CHECK(format_csv(read_csv(dir / "out.csv")) == csv.str());

    const std::string line = summary_line(r.reports);
    CHECK(line.starts_with("leaves found: 3, mean damage ratio: "));
    CHECK(summary_line({}) == "leaves found: 0, mean damage ratio: n/a%, max damage ratio: n/a%");
    fs::remove_all(dir);
}

TEST_CASE("parallel_for runs every index once and propagates errors") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 8, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int v) { return v == 1; }));
    CHECK_THROWS_AS(parallel_for(100, 4, [](std::size_t i) {
                        if (i == 37) {
                            throw MediaError("boom");
                        }
                    }),
                    MediaError);
}

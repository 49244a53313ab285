#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "plantdoctor/errors.hpp"
#include "plantdoctor/image_io.hpp"
#include "plantdoctor/report.hpp"
#include "plantdoctor/synthetic.hpp"

using namespace plantdoctor;
using namespace plantdoctor::synthetic;

namespace {

LeafSpec leaf_at(int id, double x, double y) {
    LeafSpec l;
    l.id_truth = id;
    l.start_x = x;
    l.start_y = y;
    return l;
}

SceneSpec one_leaf(std::size_t frames) {
    SceneSpec s;
    s.frame_count = frames;
    s.width = s.height = 160;
    s.leaves = {leaf_at(1, 80, 80)};
    return s;
}

}  // namespace

TEST_CASE("a stationary leaf renders identical frames and boxes") {
    const SceneRenderer r(one_leaf(5));
    const Frame f0 = r.render(0);
    const auto b0 = r.boxes(0);
    REQUIRE(b0.size() == 1);
    for (std::size_t f = 1; f < 5; ++f) {
        CHECK(r.render(f).image == f0.image);
        CHECK(r.boxes(f)[0].box == b0[0].box);
    }
    CHECK(f0.index == 0);
}

TEST_CASE("rendering is reproducible and the seed changes the texture") {
    SceneSpec s = one_leaf(3);
    s.leaves[0].velocity_x = 2.5;
    CHECK(SceneRenderer(s).render(2).image == SceneRenderer(s).render(2).image);
    SceneSpec other = s;
    other.seed = 99;
    CHECK_FALSE(SceneRenderer(other).render(2).image == SceneRenderer(s).render(2).image);
}

TEST_CASE("boxes are the tight bounds of the visible raster") {
    SceneSpec s = one_leaf(1);
    s.leaves[0].angle_deg = 30;
    const SceneRenderer r(s);
    const PixelRect box = r.boxes(0)[0].box;
    int x0 = 1 << 30, y0 = 1 << 30, x1 = -1, y1 = -1;
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            if (r.owner(0, x, y) == 0) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
        }
    }
    CHECK(box == PixelRect{x0, y0, x1 - x0 + 1, y1 - y0 + 1});
}

TEST_CASE("a blob of a tenth of the ellipse area gives a ratio near ten percent") {
    SceneSpec s = one_leaf(1);
    LeafSpec& l = s.leaves[0];
    l.semi_major = 50;
    l.semi_minor = 30;
    l.damage = {{0.0, 0.0, std::sqrt(0.1 * 50 * 30), {150, 100, 50}}};
    const SceneRenderer scene(s);
    const auto truth = scene.truth();
    REQUIRE(truth.size() == 1);
    CHECK(truth[0].ratio_pct() == doctest::Approx(10.0).epsilon(0.05));
    const LeafRaster& raster = scene.raster(0);
    CHECK(raster.leaf.count() == truth[0].leaf_area_px);
}

TEST_CASE("occlusion windows remove boxes") {
    SceneSpec s = one_leaf(15);
    s.leaves[0].occlusions = {{10, 12}};
    const SceneRenderer r(s);
    CHECK(r.boxes(9).size() == 1);
    CHECK(r.boxes(10).empty());
    CHECK(r.boxes(12).empty());
    CHECK(r.boxes(13).size() == 1);
}

TEST_CASE("later leaves are painted over earlier ones") {
    SceneSpec s = one_leaf(1);
    s.leaves.push_back(leaf_at(2, 100, 80));
    const SceneRenderer r(s);
    CHECK(r.owner(0, 95, 80) == 1);
    CHECK(r.owner(0, 50, 80) == 0);
    CHECK(r.owner(0, 2, 2) == -1);
}

TEST_CASE("a leaf that never enters the frame is a warning") {
    SceneSpec s = one_leaf(2);
    s.leaves.push_back(leaf_at(2, 5000, 5000));
    const SceneRenderer r(s);
    CHECK(r.warnings().size() == 1);
    CHECK(r.boxes(0).size() == 1);
}

TEST_CASE("blur frames lower sharpness of the sprite") {
    SceneSpec s = one_leaf(3);
    s.blur_frames = {1};
    const SceneRenderer r(s);
    CHECK_FALSE(r.render(1).image == r.render(0).image);
    CHECK(r.render(2).image == r.render(0).image);
}

TEST_CASE("scene description round trips through text") {
    SceneSpec s;
    s.seed = 42;
    s.frame_count = 12;
    s.width = 320;
    s.height = 240;
    s.blur_frames = {2, 5};
    s.blur_radius = 3;
    LeafSpec l = leaf_at(7, 100.5, 90);
    l.angle_deg = 12.5;
    l.velocity_x = 1.25;
    l.path = {{1, 2}, {3, 4}};
    l.damage = {{0.1, -0.2, 4, {10, 20, 30}}};
    l.occlusions = {{3, 4}};
    l.flagged_confidence = 0.3;
    s.leaves = {l, leaf_at(8, 10, 10)};
    const std::string text = format_scene_spec(s);
    std::istringstream in(text);
    const SceneSpec back = parse_scene_spec(in);
    CHECK(format_scene_spec(back) == text);
    CHECK(back.leaves.size() == 2);
    CHECK(back.leaves[0].path.size() == 2);
    CHECK(back.leaves[0].damage[0].color == Rgb{10, 20, 30});
    CHECK(*back.leaves[0].flagged_confidence == 0.3);
}

TEST_CASE("scene description errors") {
    auto parse = [](const std::string& t) {
        std::istringstream in(t);
        return parse_scene_spec(in);
    };
    CHECK_THROWS_AS(parse("frames = 3\nbogus = 1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[leaf]\naxes = 0,3\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[leaf]\ndamage = 0,0,3,300,0,0\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("size = 10\n"), InvalidArgument);
    CHECK_THROWS_AS((void)load_scene_spec("/nonexistent/scene.spec"), MediaError);
    CHECK_NOTHROW(parse("# only a comment\nframes = 2\n"));
}

TEST_CASE("write_scene emits frames, truth and masks") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "plantdoctor_test_write_scene";
    fs::remove_all(dir);
    SceneSpec s = one_leaf(4);
    s.leaves[0].damage = {{0.2, 0.1, 6, {160, 110, 40}}};
    write_scene(s, dir);
    CHECK(fs::exists(dir / "frames" / "000003.png"));
    CHECK(fs::exists(dir / kSceneFileName));
    CHECK(fs::exists(dir / "ground_truth.tsv"));
    const auto rows = read_csv(dir / "truth.csv");
    REQUIRE(rows.size() == 1);
    const auto truth = SceneRenderer(s).truth();
    CHECK(*rows[0].leaf_area_px == truth[0].leaf_area_px);
    CHECK(read_mask(dir / "masks" / "leaf_1.png").count() == truth[0].leaf_area_px);
    CHECK(read_image(dir / "frames" / "000001.png") == SceneRenderer(s).render(1).image);
    fs::remove_all(dir);
}

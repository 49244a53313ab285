#include <doctest.h>

#include <memory>

#include "plantdoctor/errors.hpp"
#include "plantdoctor/roi_selector.hpp"
#include "plantdoctor/segmentation.hpp"
#include "plantdoctor/synthetic.hpp"
#include "support/generators.hpp"

using namespace plantdoctor;

namespace {

Image two_level(int w, int h, std::uint8_t lo, std::uint8_t hi) {
    Image img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint8_t* p = img.at(x, y);
            p[0] = p[1] = p[2] = (x < w / 2) ? lo : hi;
        }
    }
    return img;
}

BinaryMask rect_mask(int w, int h, PixelRect r) {
    BinaryMask m(w, h);
    for (int y = r.y; y < r.bottom(); ++y) {
        for (int x = r.x; x < r.right(); ++x) {
            m.at(x, y) = 1;
        }
    }
    return m;
}

class MapBackend final : public SegmenterBackend {
public:
    ProbabilityMap predict(const Image& roi, const RoiContext&, MaskClass cls) const override {
        ProbabilityMap p{roi.width, roi.height, std::vector<float>(static_cast<std::size_t>(roi.width * roi.height), 0.F)};
        for (int y = 0; y < roi.height; ++y) {
            for (int x = 0; x < roi.width; ++x) {
                const bool big = x < 6;
                const bool small = x >= 9 && y < 2;
                const bool spot = x == 2 && y == 2;
                auto& v = p.values[static_cast<std::size_t>(y * roi.width + x)];
                v = cls == MaskClass::leaf ? ((big || small) ? 0.9F : 0.1F) : ((spot || small) ? 0.7F : 0.0F);
            }
        }
        return p;
    }
};

}  // namespace

TEST_CASE("constant images pass through preprocessing unchanged") {
    const Image flat(17, 9, 93);
    CHECK(gaussian_blur_5x5(flat) == flat);
    CHECK(equalize_luminance(flat) == flat);
    CHECK(preprocess(flat) == flat);
}

TEST_CASE("a balanced two-level image is stretched to 127 and 255") {
    const Image eq = equalize_luminance(two_level(10, 4, 50, 200));
    CHECK(eq.at(0, 0)[0] == 127);
    CHECK(eq.at(9, 0)[0] == 255);
    CHECK(eq.at(0, 3)[1] == 127);
}

TEST_CASE("equalization keeps chroma and dimensions") {
    testgen::Rng rng(21);
    const Image img = testgen::random_image(rng, 23, 17);
    const Image out = preprocess(img);
    CHECK(out.width == img.width);
    CHECK(out.height == img.height);

    Image tinted(8, 8);
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            std::uint8_t* p = tinted.at(x, y);
            p[0] = static_cast<std::uint8_t>(100 + 5 * x);
            p[1] = static_cast<std::uint8_t>(60 + 5 * x);
            p[2] = static_cast<std::uint8_t>(40 + 5 * x);
        }
    }
    const Image eq = equalize_luminance(tinted);
    for (int x = 0; x < 8; ++x) {
        const std::uint8_t* p = eq.at(x, 0);
        if (p[0] < 255 && p[2] > 0) {
            CHECK(std::abs(p[0] - p[1] - 40) <= 1);  // chroma survives
        }
    }
}

TEST_CASE("gaussian blur smooths an impulse symmetrically and keeps its mass") {
    Image impulse(9, 9, 0);
    impulse.at(4, 4)[0] = 255;
    const Image b = gaussian_blur_5x5(impulse);
    CHECK(b.at(4, 4)[0] > b.at(3, 4)[0]);
    CHECK(b.at(3, 4)[0] == b.at(5, 4)[0]);
    CHECK(b.at(4, 3)[0] == b.at(4, 5)[0]);
    CHECK(b.at(0, 0)[0] == 0);
    int mass = 0;
    for (int y = 0; y < 9; ++y) {
        for (int x = 0; x < 9; ++x) {
            mass += b.at(x, y)[0];
        }
    }
    CHECK(std::abs(mass - 255) <= 12);
}

TEST_CASE("binarize and the largest component") {
    ProbabilityMap p{3, 1, {0.2F, 0.5F, 0.9F}};
    const BinaryMask m = binarize(p, 0.5);
    CHECK(m.bits == std::vector<std::uint8_t>{0, 1, 1});
    CHECK_THROWS_AS((void)binarize(ProbabilityMap{2, 2, {0.F}}, 0.5), BackendError);

    BinaryMask two(10, 6);
    for (int y = 0; y < 2; ++y) {
        for (int x = 0; x < 2; ++x) {
            two.at(x, y) = 1;
        }
    }
    for (int y = 3; y < 6; ++y) {
        for (int x = 5; x < 10; ++x) {
            two.at(x, y) = 1;
        }
    }
    const BinaryMask kept = largest_component(two);
    CHECK(kept.count() == 15);
    CHECK(kept.at(5, 3));
    CHECK_FALSE(kept.at(0, 0));

    BinaryMask diagonal(3, 3);
    diagonal.at(0, 0) = diagonal.at(1, 1) = 1;  // 8-adjacent only: two components of one pixel
    const BinaryMask first = largest_component(diagonal);
    CHECK(first.count() == 1);
    CHECK(first.at(0, 0));
    CHECK(largest_component(BinaryMask(4, 4)).count() == 0);
}

TEST_CASE("largest component output is a single 4-connected piece") {
    testgen::Rng rng(77);
    for (int i = 0; i < 100; ++i) {
        const BinaryMask m = largest_component(testgen::random_mask(rng, rng.uniform_int(1, 30), rng.uniform_int(1, 30), 0.5));
        CHECK(largest_component(m) == m);
    }
}

TEST_CASE("damage ratio examples and invariants") {
    const BinaryMask leaf = rect_mask(100, 100, {0, 0, 100, 100});
    const BinaryMask damage = rect_mask(100, 100, {10, 10, 31, 4});
    const DamageAreas a = damage_ratio(leaf, damage);
    CHECK(a.leaf_area_px == 10000);
    CHECK(a.damage_area_px == 124);
    REQUIRE(a.ratio_pct);
    CHECK(*a.ratio_pct == doctest::Approx(1.24));

    CHECK(*damage_ratio(leaf, BinaryMask(100, 100)).ratio_pct == 0.0);
    const BinaryMask half = rect_mask(100, 100, {0, 0, 50, 100});
    const BinaryMask outside = rect_mask(100, 100, {60, 0, 40, 100});
    CHECK(*damage_ratio(half, outside).ratio_pct == 0.0);
    CHECK_FALSE(damage_ratio(BinaryMask(5, 5), rect_mask(5, 5, {0, 0, 2, 2})).ratio_pct.has_value());
    CHECK_THROWS_AS((void)damage_ratio(leaf, BinaryMask(3, 3)), InvalidArgument);

    testgen::Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const int w = rng.uniform_int(1, 40);
        const int h = rng.uniform_int(1, 40);
        const BinaryMask l = testgen::random_mask(rng, w, h, rng.uniform(0, 1));
        const BinaryMask d = testgen::random_mask(rng, w, h, rng.uniform(0, 1));
        const DamageAreas r = damage_ratio(l, d);
        if (r.ratio_pct) {
            CHECK(*r.ratio_pct >= 0.0);
            CHECK(*r.ratio_pct <= 100.0);
            CHECK(r.damage_area_px <= r.leaf_area_px);
            const DamageAreas up = damage_ratio(upscale_nearest(l, 2), upscale_nearest(d, 2));
            CHECK(*up.ratio_pct == *r.ratio_pct);
        }
    }
}

TEST_CASE("segmenter keeps the largest leaf component but every damage spot") {
    const Segmenter seg(std::make_shared<MapBackend>());
    const Image roi(12, 5);
    const RoiContext ctx{};
    const BinaryMask leaf = seg.segment_leaf(roi, ctx);
    CHECK(leaf.count() == 30);
    const BinaryMask damage = seg.segment_damage(roi, ctx);
    CHECK(damage.count() == 7);
    CHECK_THROWS_AS(SegmenterConfig{1.0}.validate(), InvalidArgument);
    CHECK_THROWS_AS(SegmenterConfig{0.0}.validate(), InvalidArgument);
}

TEST_CASE("oracle segmenter reproduces the rasterised leaf and damage") {
    synthetic::SceneSpec spec;
    spec.width = spec.height = 200;
    synthetic::LeafSpec leaf;
    leaf.id_truth = 1;
    leaf.start_x = 100;
    leaf.start_y = 100;
    leaf.damage = {{-0.4, 0.0, 6.0, {150, 100, 50}}, {0.5, 0.1, 5.0, {150, 100, 50}}};
    synthetic::LeafSpec healthy;
    healthy.id_truth = 2;
    healthy.start_x = 30;
    healthy.start_y = 30;
    healthy.semi_major = 15;
    healthy.semi_minor = 10;
    spec.leaves = {leaf, healthy};
    auto scene = std::make_shared<const synthetic::SceneRenderer>(spec);
    const Segmenter seg(std::make_shared<synthetic::OracleSegmenter>(scene, 200));
    const Frame frame = scene->render(0);
    const auto truth = scene->truth();

    for (const auto& gt : scene->boxes(0)) {
        const BoundingBox box{double(gt.box.x), double(gt.box.y), double(gt.box.width), double(gt.box.height)};
        const auto region = roi_region(box, 200, 200);
        REQUIRE(region);
        const Image roi = crop(frame.image, *region);
        const RoiContext ctx{0, 0, *region, 200, 200};
        const DamageAreas a = damage_ratio(seg.segment_leaf(roi, ctx), seg.segment_damage(roi, ctx));
        const auto& t = truth[static_cast<std::size_t>(gt.leaf_id - 1)];
        CHECK(a.leaf_area_px == t.leaf_area_px);
        CHECK(a.damage_area_px == t.damage_area_px);
        if (gt.leaf_id == 2) {
            CHECK(a.damage_area_px == 0);
        } else {
            CHECK(a.damage_area_px > 0);
        }
    }

    const Image blank(10, 10);
    const RoiContext nowhere{0, 0, PixelRect{180, 180, 10, 10}, 200, 200};
    CHECK(seg.segment_leaf(blank, nowhere).count() == 0);
}

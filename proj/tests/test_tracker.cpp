#include <doctest.h>

#include <map>
#include <memory>
#include <set>

#include "plantdoctor/errors.hpp"
#include "plantdoctor/roi_selector.hpp"
#include "plantdoctor/synthetic.hpp"
#include "plantdoctor/tracker.hpp"

using namespace plantdoctor;

namespace {

Detection at(double cx, double cy, double w = 40, double h = 40) { return {BoundingBox{cx - w / 2, cy - h / 2, w, h}, 1.0, 0}; }

Track confirmed_track(TrackId id, double cx, double cy, const Feature& look) {
    Track t;
    t.id = id;
    t.state = kalman_predict(kalman_initiate(to_measurement(at(cx, cy).bbox)));
    t.status = TrackStatus::confirmed;
    t.hits = 3;
    t.gallery.push_back(look);
    return t;
}

Feature one_hot(std::size_t k) {
    Feature f(8, 0.0);
    f[k] = 1.0;
    return f;
}

}  // namespace

TEST_CASE("associate with no tracks leaves every detection unmatched") {
    const auto a = associate({}, {at(10, 10), at(50, 50), at(90, 90)}, {}, TrackerConfig{});
    CHECK(a.matches.empty());
    CHECK(a.unmatched_tracks.empty());
    CHECK(a.unmatched_detections == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("a track matches a detection at its prediction with the same look") {
    const Track t = confirmed_track(4, 100, 100, one_hot(0));
    const auto a = associate({t}, {at(100, 100)}, {one_hot(0)}, TrackerConfig{});
    REQUIRE(a.matches.size() == 1);
    CHECK(a.matches[0] == TrackMatch{4, 0});
}

TEST_CASE("the gate overrides crossed appearance") {
    // Track 1 looks like detection 1 and vice versa, but positions are far apart.
    const std::vector<Track> tracks{confirmed_track(1, 100, 100, one_hot(0)), confirmed_track(2, 400, 400, one_hot(1))};
    const std::vector<Detection> dets{at(101, 100), at(400, 401)};
    const auto a = associate(tracks, dets, {one_hot(1), one_hot(0)}, TrackerConfig{});
    REQUIRE(a.matches.size() == 2);
    CHECK(a.matches[0] == TrackMatch{1, 0});
    CHECK(a.matches[1] == TrackMatch{2, 1});
}

TEST_CASE("a stationary leaf confirms on its third frame and keeps its id") {
    Tracker tracker(TrackerConfig{});
    std::set<TrackId> ids;
    for (std::size_t f = 0; f < 5; ++f) {
        const auto out = tracker.step(f, {at(200, 200)});
        if (f < 2) {
            CHECK(out.empty());
        } else {
            REQUIRE(out.size() == 1);
            ids.insert(out[0].track_id);
        }
    }
    CHECK(ids.size() == 1);
    CHECK(tracker.tracks().size() == 1);
    CHECK(tracker.confirmed_histories().at(*ids.begin()).size() == 5);
}

TEST_CASE("a confirmed track is deleted ten frames after its last sighting") {
    Tracker tracker(TrackerConfig{});
    std::size_t f = 0;
    for (; f <= 5; ++f) {
        (void)tracker.step(f, {at(200, 200)});
    }
    const std::size_t last_seen = 5;
    for (; f <= last_seen + 9; ++f) {
        (void)tracker.step(f, {});
        CHECK(tracker.tracks().size() == 1);
    }
    (void)tracker.step(last_seen + 10, {});
    CHECK(tracker.tracks().empty());
}

TEST_CASE("tentative tracks die on their first miss and ids are never reused") {
    Tracker tracker(TrackerConfig{});
    (void)tracker.step(0, {at(100, 100)});
    CHECK(tracker.tracks().size() == 1);
    (void)tracker.step(1, {});
    CHECK(tracker.tracks().empty());
    (void)tracker.step(2, {at(100, 100)});
    REQUIRE(tracker.tracks().size() == 1);
    CHECK(tracker.tracks()[0].id == 2);
    CHECK(tracker.confirmed_histories().empty());
}

TEST_CASE("frame indices must increase") {
    Tracker tracker(TrackerConfig{});
    (void)tracker.step(3, {});
    CHECK_THROWS_AS((void)tracker.step(3, {}), InvalidArgument);
    CHECK_THROWS_AS((void)tracker.step(1, {}), InvalidArgument);
}

TEST_CASE("config validation") {
    TrackerConfig c;
    c.n_init = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.lambda_motion = 1.5;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.max_age = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("two differently coloured leaves crossing paths keep their identities") {
    synthetic::SceneSpec spec;
    spec.frame_count = 40;
    spec.width = spec.height = 400;
    synthetic::LeafSpec a;
    a.id_truth = 1;
    a.color = {200, 60, 40};
    a.start_x = 60;
    a.start_y = 180;
    a.velocity_x = 7;
    a.semi_major = 30;
    a.semi_minor = 20;
    synthetic::LeafSpec b = a;
    b.id_truth = 2;
    b.color = {40, 180, 60};
    b.start_x = 340;
    b.start_y = 220;
    b.velocity_x = -7;
    spec.leaves = {a, b};
    auto scene = std::make_shared<const synthetic::SceneRenderer>(spec);
    const Detector detector(std::make_shared<synthetic::OracleDetector>(scene, 400), DetectorConfig{});

    Tracker tracker(TrackerConfig{});
    std::map<TrackId, std::set<int>> truth_of;
    for (std::size_t f = 0; f < spec.frame_count; ++f) {
        const Frame frame = scene->render(f);
        const auto dets = detector.detect(frame);
        const auto gt = scene->boxes(f);
        const RoiProvider roi = [&frame](const BoundingBox& box) { return crop_roi(frame.image, box); };
        for (const TrackedDetection& td : tracker.step(f, dets, roi)) {
            // Attribute each emitted box to the ground-truth leaf it overlaps most.
            double best = 0.0;
            int who = -1;
            for (const auto& g : gt) {
                const double o = iou(td.detection.bbox, BoundingBox{double(g.box.x), double(g.box.y),
                                                                    double(g.box.width), double(g.box.height)});
                if (o > best) {
                    best = o;
                    who = g.leaf_id;
                }
            }
            truth_of[td.track_id].insert(who);
        }
    }
    CHECK(truth_of.size() == 2);
    for (const auto& [id, leaves] : truth_of) {
        CHECK(leaves.size() == 1);
    }
}

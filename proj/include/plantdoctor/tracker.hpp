#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "plantdoctor/appearance.hpp"
#include "plantdoctor/detection.hpp"
#include "plantdoctor/kalman.hpp"

namespace plantdoctor {

using TrackId = std::uint64_t;

enum class TrackStatus { tentative, confirmed, deleted };

struct TrackerConfig {
    int n_init = 3;
    int max_age = 9;                 // 3 s at 3 fps
    double gate_threshold = 9.4877;  // chi-square 0.95 quantile, 4 dof
    double lambda_motion = 0.2;
    std::size_t appearance_gallery = 30;
    double iou_threshold = 0.3;

    void validate() const;
};

struct Track {
    TrackId id = 0;
    KalmanState state;
    TrackStatus status = TrackStatus::tentative;
    int hits = 0;
    int age = 0;
    int time_since_update = 0;
    std::deque<Feature> gallery;

    [[nodiscard]] BoundingBox box() const { return to_box(state.mean); }
};

struct TrackMatch {
    TrackId track_id = 0;
    std::size_t detection = 0;

    bool operator==(const TrackMatch&) const = default;
};

struct Assignment {
    std::vector<TrackMatch> matches;
    std::vector<TrackId> unmatched_tracks;
    std::vector<std::size_t> unmatched_detections;
};

/// One observed box of a track.
struct Observation {
    std::size_t frame_index = 0;
    BoundingBox bbox;
};

using TrackHistories = std::map<TrackId, std::vector<Observation>>;

/// Matching cascade over confirmed tracks, grouped by ascending
/// time_since_update, each level solved as an optimal assignment on the blended
/// motion/appearance cost with Mahalanobis gating; tentative tracks are then
/// matched to the leftover detections by IoU. `features` is either empty or
/// holds one (possibly empty) descriptor per detection. Tracks must already be
/// predicted to the current frame.
[[nodiscard]] Assignment associate(const std::vector<Track>& tracks, const std::vector<Detection>& detections,
                                   const std::vector<Feature>& features, const TrackerConfig& cfg);

/// Returns the ROI raster for a detection box, or nullopt when none is available.
using RoiProvider = std::function<std::optional<Image>(const BoundingBox&)>;

struct TrackedDetection {
    TrackId track_id = 0;
    Detection detection;
};

/// Stateful multi-leaf tracker; one instance per video, single owner.
class Tracker {
public:
    explicit Tracker(TrackerConfig config = {});

    /// Advances by one frame and returns the detections claimed by confirmed
    /// tracks. Frame indices must strictly increase across calls.
    std::vector<TrackedDetection> step(std::size_t frame_index, const std::vector<Detection>& detections,
                                       const RoiProvider& roi_provider = {});

    [[nodiscard]] const std::vector<Track>& tracks() const noexcept { return tracks_; }
    /// Observation histories of every track that reached confirmed status.
    [[nodiscard]] TrackHistories confirmed_histories() const;
    [[nodiscard]] const TrackerConfig& config() const noexcept { return config_; }

private:
    TrackerConfig config_;
    std::vector<Track> tracks_;
    TrackId next_id_ = 1;
    std::optional<std::size_t> last_frame_;
    TrackHistories histories_;
    std::set<TrackId> ever_confirmed_;
};

}  // namespace plantdoctor

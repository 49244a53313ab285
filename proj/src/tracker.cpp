#include "plantdoctor/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plantdoctor/assignment.hpp"
#include "plantdoctor/errors.hpp"

namespace plantdoctor {

namespace {

double appearance_distance(const Track& track, const Feature& feature) {
    double best = std::numeric_limits<double>::infinity();
    for (const Feature& g : track.gallery) {
        best = std::min(best, cosine_distance(g, feature));
    }
    return best;
}

// Solves one block of the association and records matches; detections taken
// are erased from `pool`.
void match_block(const std::vector<std::size_t>& rows, std::vector<std::size_t>& pool, const CostMatrix& cost,
                 const std::vector<Track>& tracks, Assignment& out, std::vector<char>& track_matched) {
    std::vector<char> taken(pool.size(), 0);
    for (const MatchedPair& mp : solve_assignment(cost)) {
        out.matches.push_back({tracks[rows[mp.row]].id, pool[mp.col]});
        track_matched[rows[mp.row]] = 1;
        taken[mp.col] = 1;
    }
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!taken[i]) {
            rest.push_back(pool[i]);
        }
    }
    pool = std::move(rest);
}

}  // namespace

void TrackerConfig::validate() const {
    if (n_init < 1) {
        throw InvalidArgument("tracker.n_init must be >= 1");
    }
    if (max_age < 1) {
        throw InvalidArgument("tracker.max_age must be >= 1");
    }
    if (!(gate_threshold > 0.0)) {
        throw InvalidArgument("tracker.gate_threshold must be positive");
    }
    if (!(lambda_motion >= 0.0 && lambda_motion <= 1.0)) {
        throw InvalidArgument("tracker.lambda_motion must lie in [0, 1]");
    }
    if (appearance_gallery == 0) {
        throw InvalidArgument("tracker.appearance_gallery must be positive");
    }
    if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0)) {
        throw InvalidArgument("tracker.iou_threshold must lie in [0, 1]");
    }
}

Assignment associate(const std::vector<Track>& tracks, const std::vector<Detection>& detections,
                     const std::vector<Feature>& features, const TrackerConfig& cfg) {
    if (!features.empty() && features.size() != detections.size()) {
        throw InvalidArgument("one feature slot per detection expected");
    }
    Assignment out;
    std::vector<std::size_t> pool(detections.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        pool[i] = i;
    }
    std::vector<char> matched(tracks.size(), 0);

    std::vector<Measurement> measurements;
    measurements.reserve(detections.size());
    for (const Detection& d : detections) {
        measurements.push_back(to_measurement(d.bbox));
    }

    // Matching cascade: confirmed tracks, most recently updated first.
    std::vector<int> levels;
    for (const Track& t : tracks) {
        if (t.status == TrackStatus::confirmed) {
            levels.push_back(t.time_since_update);
        }
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    for (int level : levels) {
        if (pool.empty()) {
            break;
        }
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < tracks.size(); ++i) {
            if (tracks[i].status == TrackStatus::confirmed && tracks[i].time_since_update == level) {
                rows.push_back(i);
            }
        }
        CostMatrix cost(rows.size(), pool.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const Track& t = tracks[rows[r]];
            const MeasurementDistribution proj = kalman_project(t.state);
            for (std::size_t c = 0; c < pool.size(); ++c) {
                const double gate = mahalanobis_squared(proj.mean, proj.covariance, measurements[pool[c]]);
                if (gate > cfg.gate_threshold) {
                    cost.forbid(r, c);
                    continue;
                }
                const double motion = gate / cfg.gate_threshold;
                const bool have_feature = !features.empty() && !features[pool[c]].empty() && !t.gallery.empty();
                cost(r, c) = have_feature ? cfg.lambda_motion * motion +
                                                (1.0 - cfg.lambda_motion) * appearance_distance(t, features[pool[c]])
                                          : motion;
            }
        }
        match_block(rows, pool, cost, tracks, out, matched);
    }

    // IoU pass for tentative tracks.
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        if (tracks[i].status == TrackStatus::tentative) {
            rows.push_back(i);
        }
    }
    if (!rows.empty() && !pool.empty()) {
        CostMatrix cost(rows.size(), pool.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const BoundingBox predicted = tracks[rows[r]].box();
            for (std::size_t c = 0; c < pool.size(); ++c) {
                const double overlap = iou(predicted, detections[pool[c]].bbox);
                if (overlap < cfg.iou_threshold) {
                    cost.forbid(r, c);
                } else {
                    cost(r, c) = 1.0 - overlap;
                }
            }
        }
        match_block(rows, pool, cost, tracks, out, matched);
    }

    for (std::size_t i = 0; i < tracks.size(); ++i) {
        if (!matched[i] && tracks[i].status != TrackStatus::deleted) {
            out.unmatched_tracks.push_back(tracks[i].id);
        }
    }
    std::sort(pool.begin(), pool.end());
    out.unmatched_detections = std::move(pool);
    std::sort(out.matches.begin(), out.matches.end(),
              [](const TrackMatch& a, const TrackMatch& b) { return a.track_id < b.track_id; });
    return out;
}

Tracker::Tracker(TrackerConfig config) : config_(config) {
    config_.validate();
}

std::vector<TrackedDetection> Tracker::step(std::size_t frame_index, const std::vector<Detection>& detections,
                                            const RoiProvider& roi_provider) {
    if (last_frame_ && frame_index <= *last_frame_) {
        throw InvalidArgument("tracker frame indices must strictly increase");
    }
    last_frame_ = frame_index;

    for (Track& t : tracks_) {
        t.state = kalman_predict(t.state);
        ++t.age;
        ++t.time_since_update;
    }

    std::vector<Feature> features;
    if (roi_provider) {
        features.resize(detections.size());
        for (std::size_t i = 0; i < detections.size(); ++i) {
            if (auto roi = roi_provider(detections[i].bbox); roi && !roi->empty()) {
                features[i] = appearance_feature(*roi);
            }
        }
    }

    const Assignment assignment = associate(tracks_, detections, features, config_);

    std::map<TrackId, std::size_t> slot;
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        slot[tracks_[i].id] = i;
    }

    std::vector<TrackedDetection> emitted;
    for (const TrackMatch& m : assignment.matches) {
        Track& t = tracks_[slot.at(m.track_id)];
        const Detection& det = detections[m.detection];
        t.state = kalman_update(t.state, to_measurement(det.bbox));
        ++t.hits;
        t.time_since_update = 0;
        if (!features.empty() && !features[m.detection].empty()) {
            t.gallery.push_back(features[m.detection]);
            while (t.gallery.size() > config_.appearance_gallery) {
                t.gallery.pop_front();
            }
        }
        histories_[t.id].push_back({frame_index, det.bbox});
        if (t.status == TrackStatus::tentative && t.hits >= config_.n_init) {
            t.status = TrackStatus::confirmed;
            ever_confirmed_.insert(t.id);
        }
        if (t.status == TrackStatus::confirmed) {
            emitted.push_back({t.id, det});
        }
    }

    for (TrackId id : assignment.unmatched_tracks) {
        Track& t = tracks_[slot.at(id)];
        t.hits = 0;
        if (t.status == TrackStatus::tentative || t.time_since_update > config_.max_age) {
            t.status = TrackStatus::deleted;
        }
    }

    for (std::size_t d : assignment.unmatched_detections) {
        const Detection& det = detections[d];
        Track t;
        t.id = next_id_++;
        t.state = kalman_initiate(to_measurement(det.bbox));
        t.hits = 1;
        t.age = 1;
        t.time_since_update = 0;
        if (!features.empty() && !features[d].empty()) {
            t.gallery.push_back(features[d]);
        }
        histories_[t.id].push_back({frame_index, det.bbox});
        if (t.hits >= config_.n_init) {
            t.status = TrackStatus::confirmed;
            ever_confirmed_.insert(t.id);
            emitted.push_back({t.id, det});
        }
        tracks_.push_back(std::move(t));
    }

    for (const Track& t : tracks_) {
        if (t.status == TrackStatus::deleted && !ever_confirmed_.contains(t.id)) {
            histories_.erase(t.id);
        }
    }
    std::erase_if(tracks_, [](const Track& t) { return t.status == TrackStatus::deleted; });
    return emitted;
}

TrackHistories Tracker::confirmed_histories() const {
    TrackHistories out;
    for (TrackId id : ever_confirmed_) {
        if (auto it = histories_.find(id); it != histories_.end()) {
            out.emplace(id, it->second);
        }
    }
    return out;
}

}  // namespace plantdoctor

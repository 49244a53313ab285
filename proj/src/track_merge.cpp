#include "plantdoctor/track_merge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "plantdoctor/errors.hpp"

namespace plantdoctor {

namespace {

std::vector<Observation> sorted_by_frame(std::vector<Observation> obs) {
    std::stable_sort(obs.begin(), obs.end(),
                     [](const Observation& a, const Observation& b) { return a.frame_index < b.frame_index; });
    return obs;
}

struct Point {
    double x;
    double y;
};

Point center(const BoundingBox& b) {
    return {b.center_x(), b.center_y()};
}

// Centre of the chain's last box extrapolated to `frame` at the velocity seen
// over its trailing window.
Point extrapolate(const std::vector<Observation>& chain, std::size_t frame, std::size_t window) {
    const Observation& last = chain.back();
    const std::size_t span = std::min(window, chain.size());
    const Observation& first = chain[chain.size() - span];
    Point p = center(last.bbox);
    if (last.frame_index > first.frame_index) {
        const double dt = static_cast<double>(last.frame_index - first.frame_index);
        const Point q = center(first.bbox);
        const double ahead = static_cast<double>(frame - last.frame_index);
        p.x += (p.x - q.x) / dt * ahead;
        p.y += (p.y - q.y) / dt * ahead;
    }
    return p;
}

}  // namespace

void MergeConfig::validate() const {
    if (!(dist_max >= 0.0)) {
        throw InvalidArgument("merge.dist_max must be non-negative");
    }
    if (!(min_scale_ratio > 0.0 && min_scale_ratio <= max_scale_ratio)) {
        throw InvalidArgument("merge scale band must satisfy 0 < min <= max");
    }
    if (velocity_window == 0) {
        throw InvalidArgument("merge.velocity_window must be positive");
    }
}

IdRemap merge_fragmented_tracks(const TrackHistories& histories, const MergeConfig& cfg) {
    cfg.validate();
    IdRemap remap;
    struct Entry {
        TrackId id;
        std::vector<Observation> obs;
    };
    std::vector<Entry> order;
    for (const auto& [id, obs] : histories) {
        remap[id] = id;
        if (!obs.empty()) {
            order.push_back({id, sorted_by_frame(obs)});
        }
    }
    std::stable_sort(order.begin(), order.end(), [](const Entry& a, const Entry& b) {
        return a.obs.front().frame_index < b.obs.front().frame_index;
    });

    std::map<TrackId, std::vector<Observation>> chains;  // surviving id -> concatenated observations
    for (Entry& e : order) {
        const Observation& head = e.obs.front();
        const Point start = center(head.bbox);
        std::optional<TrackId> best;
        double best_dist = std::numeric_limits<double>::infinity();
        for (const auto& [root, chain] : chains) {
            const Observation& tail = chain.back();
            if (tail.frame_index >= head.frame_index || head.frame_index - tail.frame_index > cfg.gap_max) {
                continue;
            }
            const double scale = std::sqrt(head.bbox.area() / tail.bbox.area());
            if (!(scale >= cfg.min_scale_ratio && scale <= cfg.max_scale_ratio)) {
                continue;
            }
            const Point guess = extrapolate(chain, head.frame_index, cfg.velocity_window);
            const double dist = std::hypot(guess.x - start.x, guess.y - start.y);
            if (dist > cfg.dist_max * tail.bbox.height) {
                continue;
            }
            if (dist < best_dist) {
                best_dist = dist;
                best = root;
            }
        }
        if (best) {
            remap[e.id] = *best;
            auto& chain = chains[*best];
            chain.insert(chain.end(), e.obs.begin(), e.obs.end());
        } else {
            chains.emplace(e.id, std::move(e.obs));
        }
    }
    return remap;
}

TrackHistories apply_remap(const TrackHistories& histories, const IdRemap& remap) {
    TrackHistories out;
    for (const auto& [id, obs] : histories) {
        const auto it = remap.find(id);
        const TrackId target = it == remap.end() ? id : it->second;
        auto& dst = out[target];
        dst.insert(dst.end(), obs.begin(), obs.end());
    }
    for (auto& [id, obs] : out) {
        obs = sorted_by_frame(std::move(obs));
    }
    return out;
}

}  // namespace plantdoctor

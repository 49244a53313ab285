#pragma once

#include <cstddef>
#include <map>

#include "plantdoctor/tracker.hpp"

namespace plantdoctor {

struct MergeConfig {
    /// Largest gap, in frames, between the last observation of the earlier track
    /// and the first observation of the later one.
    std::size_t gap_max = 12;
    /// Allowed distance between extrapolated and observed centre, in units of
    /// the earlier track's last box height.
    double dist_max = 1.0;
    double min_scale_ratio = 0.5;
    double max_scale_ratio = 2.0;
    /// Trailing observations used to estimate the earlier track's velocity.
    std::size_t velocity_window = 5;

    void validate() const;
};

/// Maps every track id to the id it survives under (itself when unmerged).
using IdRemap = std::map<TrackId, TrackId>;

/// Offline repair of tracks split by a tracking gap. A later track joins an
/// earlier chain when it starts 1..gap_max frames after the chain's last
/// observation, the chain's constant-velocity extrapolation lands within
/// dist_max box heights of its first centre, and the linear box scale ratio is
/// inside the allowed band. Temporally overlapping tracks never merge; each
/// chain absorbs at most one successor per end point, so the result is
/// transitively closed and idempotent.
[[nodiscard]] IdRemap merge_fragmented_tracks(const TrackHistories& histories, const MergeConfig& cfg = {});

/// Concatenates histories under their surviving ids, ordered by frame.
[[nodiscard]] TrackHistories apply_remap(const TrackHistories& histories, const IdRemap& remap);

}  // namespace plantdoctor

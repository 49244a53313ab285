#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "plantdoctor/tracker.hpp"

namespace plantdoctor {

/// One row of the per-leaf health table. Area and ratio fields are empty when
/// no leaf pixels were found in the selected ROI.
struct LeafReport {
    TrackId leaf_id = 0;
    std::size_t best_frame = 0;
    std::optional<std::size_t> leaf_area_px;
    std::optional<std::size_t> damage_area_px;
    std::optional<double> ratio_pct;

    bool operator==(const LeafReport&) const = default;
};

inline constexpr const char* kCsvHeader = "leaf_id,best_frame,leaf_area_px,damage_area_px,damage_ratio_pct";

/// Header plus one LF-terminated row per report, ratio with two decimals.
[[nodiscard]] std::string format_csv(const std::vector<LeafReport>& reports);
void write_csv(const std::vector<LeafReport>& reports, const std::filesystem::path& path);

/// Throws InvalidArgument on a schema mismatch, MediaError when unreadable.
[[nodiscard]] std::vector<LeafReport> parse_csv(std::istream& in);
[[nodiscard]] std::vector<LeafReport> read_csv(const std::filesystem::path& path);

struct ComparisonRow {
    TrackId leaf_id = 0;
    double software_pct = 0.0;
    double manual_pct = 0.0;
    double absolute_pp = 0.0;              // |software - manual|, percentage points
    std::optional<double> relative_pct;   // absolute / manual * 100; empty when manual is 0
};

struct Comparison {
    std::vector<ComparisonRow> rows;
    std::vector<TrackId> only_software;  // ids (or empty ratios) present in one table only
    std::vector<TrackId> only_manual;
    std::optional<double> mean_absolute_pp;
    std::optional<double> mean_relative_pct;
};

/// Joins the two tables on leaf_id. Rows missing a ratio on either side count
/// as unmatched and stay out of the aggregates.
[[nodiscard]] Comparison compare_annotations(const std::vector<LeafReport>& software,
                                             const std::vector<LeafReport>& manual);

/// TSV rendering: per-leaf rows, unmatched section, aggregate line.
[[nodiscard]] std::string format_comparison(const Comparison& cmp);

}  // namespace plantdoctor

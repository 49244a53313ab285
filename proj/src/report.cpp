#include "plantdoctor/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "plantdoctor/errors.hpp"
#include "text_util.hpp"

namespace plantdoctor {

std::string format_csv(const std::vector<LeafReport>& reports) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const LeafReport& r : reports) {
        out += std::to_string(r.leaf_id);
        out += ',';
        out += std::to_string(r.best_frame);
        out += ',';
        if (r.leaf_area_px) {
            out += std::to_string(*r.leaf_area_px);
        }
        out += ',';
        if (r.damage_area_px) {
            out += std::to_string(*r.damage_area_px);
        }
        out += ',';
        if (r.ratio_pct) {
            out += text::format_fixed2(*r.ratio_pct);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const std::vector<LeafReport>& reports, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw MediaError("cannot open for writing: " + path.string());
    }
    os << format_csv(reports);
    os.flush();
    if (!os) {
        throw MediaError("write failed: " + path.string());
    }
}

std::vector<LeafReport> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || text::trim(line) != kCsvHeader) {
        throw InvalidArgument(std::string("CSV header must be ") + kCsvHeader);
    }
    std::vector<LeafReport> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) {
            continue;
        }
        const auto f = text::split(text::trim(line), ',');
        if (f.size() != 5) {
            throw InvalidArgument("CSV line " + std::to_string(lineno) + ": expected 5 fields");
        }
        LeafReport r;
        r.leaf_id = static_cast<TrackId>(text::parse_int(f[0], "leaf_id"));
        r.best_frame = static_cast<std::size_t>(text::parse_int(f[1], "best_frame"));
        if (!f[2].empty()) {
            r.leaf_area_px = static_cast<std::size_t>(text::parse_int(f[2], "leaf_area_px"));
        }
        if (!f[3].empty()) {
            r.damage_area_px = static_cast<std::size_t>(text::parse_int(f[3], "damage_area_px"));
        }
        if (!f[4].empty()) {
            r.ratio_pct = text::parse_double(f[4], "damage_ratio_pct");
        }
        out.push_back(r);
    }
    return out;
}

std::vector<LeafReport> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MediaError("cannot open CSV: " + path.string());
    }
    return parse_csv(in);
}

Comparison compare_annotations(const std::vector<LeafReport>& software, const std::vector<LeafReport>& manual) {
    std::map<TrackId, const LeafReport*> pd;
    std::map<TrackId, const LeafReport*> ma;
    for (const LeafReport& r : software) {
        pd[r.leaf_id] = &r;
    }
    for (const LeafReport& r : manual) {
        ma[r.leaf_id] = &r;
    }
    Comparison cmp;
    double abs_sum = 0.0;
    double rel_sum = 0.0;
    std::size_t rel_count = 0;
    for (const auto& [id, p] : pd) {
        const auto it = ma.find(id);
        if (it == ma.end() || !p->ratio_pct || !it->second->ratio_pct) {
            cmp.only_software.push_back(id);
            continue;
        }
        ComparisonRow row;
        row.leaf_id = id;
        row.software_pct = *p->ratio_pct;
        row.manual_pct = *it->second->ratio_pct;
        row.absolute_pp = std::abs(row.software_pct - row.manual_pct);
        if (row.manual_pct != 0.0) {
            row.relative_pct = row.absolute_pp / row.manual_pct * 100.0;
            rel_sum += *row.relative_pct;
            ++rel_count;
        } else if (row.absolute_pp == 0.0) {
            row.relative_pct = 0.0;
            ++rel_count;
        }
        abs_sum += row.absolute_pp;
        cmp.rows.push_back(row);
    }
    for (const auto& [id, m] : ma) {
        const auto it = pd.find(id);
        if (it == pd.end() || !it->second->ratio_pct || !m->ratio_pct) {
            cmp.only_manual.push_back(id);
        }
    }
    if (!cmp.rows.empty()) {
        cmp.mean_absolute_pp = abs_sum / static_cast<double>(cmp.rows.size());
    }
    if (rel_count > 0) {
        cmp.mean_relative_pct = rel_sum / static_cast<double>(rel_count);
    }
    return cmp;
}

std::string format_comparison(const Comparison& cmp) {
    std::ostringstream os;
    os << "leaf_id\tsoftware_pct\tmanual_pct\tabs_diff_pp\trel_diff_pct\n";
    for (const ComparisonRow& r : cmp.rows) {
        os << r.leaf_id << '\t' << text::format_fixed2(r.software_pct) << '\t' << text::format_fixed2(r.manual_pct)
           << '\t' << text::format_fixed2(r.absolute_pp) << '\t'
           << (r.relative_pct ? text::format_fixed2(*r.relative_pct) : std::string()) << '\n';
    }
    for (TrackId id : cmp.only_software) {
        os << "# unmatched\tsoftware\t" << id << '\n';
    }
    for (TrackId id : cmp.only_manual) {
        os << "# unmatched\tmanual\t" << id << '\n';
    }
    os << "mean\t\t\t" << (cmp.mean_absolute_pp ? text::format_fixed2(*cmp.mean_absolute_pp) : std::string()) << '\t'
       << (cmp.mean_relative_pct ? text::format_fixed2(*cmp.mean_relative_pct) : std::string()) << '\n';
    return os.str();
}

}  // namespace plantdoctor

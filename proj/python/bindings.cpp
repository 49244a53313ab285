#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <sstream>

#include "plantdoctor/assignment.hpp"
#include "plantdoctor/config.hpp"
#include "plantdoctor/errors.hpp"
#include "plantdoctor/ingest.hpp"
#include "plantdoctor/metrics.hpp"
#include "plantdoctor/parallel.hpp"
#include "plantdoctor/pipeline.hpp"
#include "plantdoctor/report.hpp"
#include "plantdoctor/roi_selector.hpp"
#include "plantdoctor/synthetic.hpp"

namespace py = pybind11;
using namespace plantdoctor;

namespace {

using GrayArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using MaskArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

GrayImage to_gray(const GrayArray& a) {
    if (a.ndim() != 2) {
        throw InvalidArgument("expected a 2-D array");
    }
    GrayImage g(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    std::memcpy(g.pixels.data(), a.data(), g.pixels.size() * sizeof(double));
    return g;
}

BinaryMask to_mask(const MaskArray& a) {
    if (a.ndim() != 2) {
        throw InvalidArgument("expected a 2-D array");
    }
    BinaryMask m(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    const bool* src = a.data();
    for (std::size_t i = 0; i < m.bits.size(); ++i) {
        m.bits[i] = src[i] ? 1 : 0;
    }
    return m;
}

py::array_t<std::uint8_t> from_image(const Image& img) {
    py::array_t<std::uint8_t> out({img.height, img.width, 3});
    std::memcpy(out.mutable_data(), img.pixels.data(), img.pixels.size());
    return out;
}

Image to_image(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 3 || a.shape(2) != 3) {
        throw InvalidArgument("expected an HxWx3 uint8 array");
    }
    Image img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    std::memcpy(img.pixels.data(), a.data(), img.pixels.size());
    return img;
}

py::dict report_dict(const LeafReport& r) {
    py::dict d;
    d["leaf_id"] = r.leaf_id;
    d["best_frame"] = r.best_frame;
    d["leaf_area_px"] = r.leaf_area_px;
    d["damage_area_px"] = r.damage_area_px;
    d["damage_ratio_pct"] = r.ratio_pct;
    return d;
}

std::vector<LeafReport> ratios_to_reports(const std::map<TrackId, std::optional<double>>& ratios) {
    std::vector<LeafReport> out;
    for (const auto& [id, ratio] : ratios) {
        LeafReport r;
        r.leaf_id = id;
        r.ratio_pct = ratio;
        out.push_back(r);
    }
    return out;
}

RunConfig make_config(const std::string& input, const std::map<std::string, std::string>& options) {
    RunConfig cfg;
    for (const auto& [k, v] : options) {
        set_config_value(cfg, k, v);
    }
    cfg.input = input;
    return cfg;
}

py::dict run_on_frames(const std::vector<Image>& frames, const std::map<std::string, std::string>& options) {
    RunConfig cfg = make_config("", options);
    cfg.validate();
    const Backends backends = load_backends(cfg);
    FrameStream stream(std::make_unique<MemorySource>(frames), cfg.resolved_ingest());
    const PipelineResult r = run_pipeline(stream, backends, cfg, worker_count());
    py::list rows;
    for (const auto& rep : r.reports) {
        rows.append(report_dict(rep));
    }
    py::dict out;
    out["reports"] = rows;
    out["csv"] = format_csv(r.reports);
    out["frames_processed"] = r.frames_processed;
    out["raw_track_count"] = r.raw_histories.size();
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Per-leaf damage analysis: image metrics, assignment, synthetic scenes and the analysis pipeline.";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<MediaError>(m, "MediaError", PyExc_OSError);
    py::register_exception<BackendError>(m, "BackendError", PyExc_RuntimeError);

    m.def("laplacian_variance", [](const GrayArray& a) { return metrics::laplacian_variance(to_gray(a)); }, py::arg("image"));
    m.def("ssim", [](const GrayArray& a, const GrayArray& b) { return metrics::ssim(to_gray(a), to_gray(b)); },
          py::arg("a"), py::arg("b"));
    m.def("mask_iou", [](const MaskArray& a, const MaskArray& b) { return metrics::mask_iou(to_mask(a), to_mask(b)); },
          py::arg("a"), py::arg("b"));
    m.def("dice", [](const MaskArray& a, const MaskArray& b) { return metrics::dice(to_mask(a), to_mask(b)); },
          py::arg("a"), py::arg("b"));
    m.def("score_entry", &score_entry, py::arg("sharpness"), py::arg("similarity"));
    m.def("downsample_indices", &downsample_indices, py::arg("source_fps"), py::arg("target_fps"), py::arg("frame_count"));

    m.def(
        "solve_assignment",
        [](const GrayArray& cost, std::optional<MaskArray> forbidden) {
            if (cost.ndim() != 2) {
                throw InvalidArgument("cost must be a 2-D array");
            }
            const auto rows = static_cast<std::size_t>(cost.shape(0));
            const auto cols = static_cast<std::size_t>(cost.shape(1));
            CostMatrix cm(rows, cols);
            const double* c = cost.data();
            for (std::size_t i = 0; i < rows * cols; ++i) {
                cm(i / cols, i % cols) = c[i];
            }
            if (forbidden) {
                if (forbidden->ndim() != 2 || static_cast<std::size_t>(forbidden->shape(0)) != rows ||
                    static_cast<std::size_t>(forbidden->shape(1)) != cols) {
                    throw InvalidArgument("forbidden must have the shape of cost");
                }
                const bool* f = forbidden->data();
                for (std::size_t i = 0; i < rows * cols; ++i) {
                    if (f[i]) {
                        cm.forbid(i / cols, i % cols);
                    }
                }
            }
            std::vector<std::pair<std::size_t, std::size_t>> out;
            for (const MatchedPair& p : solve_assignment(cm)) {
                out.emplace_back(p.row, p.col);
            }
            return out;
        },
        py::arg("cost"), py::arg("forbidden") = py::none());

    m.def(
        "compare_annotations",
        [](const std::map<TrackId, std::optional<double>>& software, const std::map<TrackId, std::optional<double>>& manual) {
            const Comparison cmp = compare_annotations(ratios_to_reports(software), ratios_to_reports(manual));
            py::list rows;
            for (const auto& r : cmp.rows) {
                py::dict d;
                d["leaf_id"] = r.leaf_id;
                d["software_pct"] = r.software_pct;
                d["manual_pct"] = r.manual_pct;
                d["absolute_pp"] = r.absolute_pp;
                d["relative_pct"] = r.relative_pct;
                rows.append(d);
            }
            py::dict out;
            out["rows"] = rows;
            out["only_software"] = cmp.only_software;
            out["only_manual"] = cmp.only_manual;
            out["mean_absolute_pp"] = cmp.mean_absolute_pp;
            out["mean_relative_pct"] = cmp.mean_relative_pct;
            out["text"] = format_comparison(cmp);
            return out;
        },
        py::arg("software"), py::arg("manual"));

    m.def(
        "render_scene",
        [](const std::string& spec_text) {
            std::istringstream in(spec_text);
            const synthetic::RenderedScene scene = synthetic::render(synthetic::parse_scene_spec(in));
            py::list frames;
            for (const Frame& f : scene.frames) {
                frames.append(from_image(f.image));
            }
            py::list boxes;
            for (const auto& per_frame : scene.boxes) {
                py::list fb;
                for (const auto& b : per_frame) {
                    fb.append(py::make_tuple(b.leaf_id, b.box.x, b.box.y, b.box.width, b.box.height));
                }
                boxes.append(fb);
            }
            py::dict truth;
            for (const auto& t : scene.truth) {
                truth[py::int_(t.leaf_id)] = py::make_tuple(t.leaf_area_px, t.damage_area_px, t.ratio_pct());
            }
            py::dict out;
            out["frames"] = frames;
            out["boxes"] = boxes;
            out["truth"] = truth;
            return out;
        },
        py::arg("spec_text"), "Renders a scene description; returns frames (HxWx3 uint8), per-frame boxes and truth.");

    m.def("write_scene",
          [](const std::string& spec_text, const std::filesystem::path& out_dir) {
              std::istringstream in(spec_text);
              synthetic::write_scene(synthetic::parse_scene_spec(in), out_dir);
          },
          py::arg("spec_text"), py::arg("out_dir"));

    m.def(
        "analyze",
        [](const std::string& input, const std::map<std::string, std::string>& options) {
            const RunConfig cfg = make_config(input, options);
            std::istringstream no_stdin;
            std::ostringstream csv;
            PipelineResult r;
            {
                py::gil_scoped_release release;
                r = analyze(cfg, no_stdin, csv);
            }
            py::list rows;
            for (const auto& rep : r.reports) {
                rows.append(report_dict(rep));
            }
            return rows;
        },
        py::arg("input"), py::arg("options") = std::map<std::string, std::string>{},
        "Runs the full analysis on a frame directory. `options` maps configuration keys to values.");

    m.def(
        "analyze_frames",
        [](const std::vector<py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>>& frames,
           const std::map<std::string, std::string>& options) {
            std::vector<Image> images;
            images.reserve(frames.size());
            for (const auto& f : frames) {
                images.push_back(to_image(f));
            }
            return run_on_frames(images, options);
        },
        py::arg("frames"), py::arg("options") = std::map<std::string, std::string>{},
        "Runs the pipeline on in-memory HxWx3 frames. The oracle backends need options['oracle.scene'].");

    m.def("config_keys", &config_keys);
    m.def("summary_line", [](const std::vector<py::dict>& rows) {
        std::vector<LeafReport> reports;
        for (const auto& d : rows) {
            LeafReport r;
            r.leaf_id = d["leaf_id"].cast<TrackId>();
            r.ratio_pct = d["damage_ratio_pct"].cast<std::optional<double>>();
            reports.push_back(r);
        }
        return summary_line(reports);
    });
}

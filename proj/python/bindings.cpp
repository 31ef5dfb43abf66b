#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "textspot/annotation.hpp"
#include "textspot/cli.hpp"
#include "textspot/error.hpp"
#include "textspot/geometry.hpp"
#include "textspot/io.hpp"
#include "textspot/lexicon.hpp"
#include "textspot/matching.hpp"
#include "textspot/metrics.hpp"
#include "textspot/normalize.hpp"

namespace py = pybind11;
using namespace textspot;

namespace {

Polygon to_polygon(const std::vector<std::pair<double, double>>& pts) {
    std::vector<Point> v;
    v.reserve(pts.size());
    for (const auto& [x, y] : pts) v.push_back({x, y});
    return Polygon(std::move(v));
}

std::vector<std::pair<double, double>> to_pairs(const Polygon& p) {
    std::vector<std::pair<double, double>> out;
    for (const Point& q : p.vertices()) out.emplace_back(q.x, q.y);
    return out;
}

py::dict violation_dict(const Violation& v) {
    py::dict d;
    d["id"] = v.subject_id;
    d["rule"] = v.rule;
    d["message"] = v.message;
    d["severity"] = std::string(to_string(v.severity));
    return d;
}

Protocol protocol_from(const std::string& name) {
    if (name == "e2e" || name == "end_to_end") return Protocol::kEndToEnd;
    if (name == "word-spotting" || name == "word_spotting") return Protocol::kWordSpotting;
    throw py::value_error("protocol must be 'e2e' or 'word-spotting'");
}

}  // namespace

PYBIND11_MODULE(_textspot, m) {
    m.doc() = "Open Images V5 Text annotation tools and polygon text-spotting evaluation";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<GeometryError>(m, "GeometryError", error);
    auto parse_error = py::register_exception<ParseError>(m, "ParseError", error);
    py::register_exception<SchemaError>(m, "SchemaError", parse_error);
    py::register_exception<MatchingError>(m, "MatchingError", error);
    py::register_exception<LexiconError>(m, "LexiconError", error);

    // geometry
    m.def(
        "polygon_area", [](const std::vector<std::pair<double, double>>& p) { return polygon_area(to_polygon(p)); },
        py::arg("points"), "Absolute area of a simple polygon given as [(x, y), ...].");
    m.def(
        "intersection_area",
        [](const std::vector<std::pair<double, double>>& a, const std::vector<std::pair<double, double>>& b) {
            return polygon_intersection_area(to_polygon(a), to_polygon(b));
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "iou",
        [](const std::vector<std::pair<double, double>>& a, const std::vector<std::pair<double, double>>& b) {
            return iou(to_polygon(a), to_polygon(b));
        },
        py::arg("a"), py::arg("b"), "Intersection over union of two simple polygons.");
    m.def(
        "normalize_polygon",
        [](const std::vector<std::pair<double, double>>& p) {
            const NormalizedPolygon n = normalize_polygon(to_polygon(p));
            return py::make_tuple(to_pairs(n.polygon), n.self_intersecting);
        },
        py::arg("points"), "Counter-clockwise, deduplicated ring and a self-intersection flag.");

    // annotation
    m.def(
        "coco_round_trip", [](const std::string& doc) { return serialize_coco_text(parse_coco_text(doc)); },
        py::arg("document"), "Parse a COCO-like text annotation document and return its canonical form.");
    m.def(
        "subset_stats",
        [](const std::string& doc) {
            const SubsetStats s = subset_stats(parse_coco_text(doc));
            return py::make_tuple(s.images, s.instances, s.legible);
        },
        py::arg("document"), "(images, instances, legible) for an annotation document.");
    m.def(
        "aggregate_stats",
        [](const std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>>& rows) {
            std::vector<SubsetStats> v;
            for (const auto& [i, n, l] : rows) v.push_back({i, n, l});
            const SubsetStats s = aggregate_stats(v);
            return py::make_tuple(s.images, s.instances, s.legible);
        },
        py::arg("rows"));
    m.def(
        "validate",
        [](const std::string& doc, const std::string& charset) {
            ValidationOptions o;
            if (charset == "alnum") {
                o.charset = CharsetPolicy::kAlphanumeric;
            } else if (charset == "any") {
                o.charset = CharsetPolicy::kAny;
            } else if (charset != "printable-ascii") {
                throw py::value_error("charset must be printable-ascii, alnum or any");
            }
            py::list out;
            for (const Violation& v : validate(parse_coco_text(doc), o).violations) out.append(violation_dict(v));
            return out;
        },
        py::arg("document"), py::arg("charset") = "printable-ascii");
    m.def(
        "icdar_to_coco",
        [](const std::string& text, const std::string& image_id) {
            Dataset d;
            d.instances = parse_icdar_quad_gt(text, image_id);
            double w = 0.0, h = 0.0;
            for (const TextInstance& t : d.instances) {
                const AxisAlignedBox b = bounding_box(t.polygon);
                w = std::max(w, b.x_max);
                h = std::max(h, b.y_max);
            }
            d.images.push_back({image_id, image_id, static_cast<std::int64_t>(std::ceil(w)),
                                static_cast<std::int64_t>(std::ceil(h)), {}});
            return serialize_coco_text(d);
        },
        py::arg("text"), py::arg("image_id"));

    // lexicon and metrics
    m.def("edit_distance", &edit_distance, py::arg("a"), py::arg("b"));
    m.def(
        "weighted_edit_distance",
        [](const std::string& pred, const std::string& alphabet, std::vector<std::vector<double>> rows,
           const std::string& candidate) {
            return weighted_edit_distance(pred, CharProbMatrix::from_utf8(alphabet, std::move(rows)), candidate);
        },
        py::arg("pred"), py::arg("alphabet"), py::arg("rows"), py::arg("candidate"));
    m.def(
        "normalize_transcription",
        [](const std::string& s, bool case_fold) {
            NormalizationPolicy p;
            p.case_fold = case_fold;
            return normalize_transcription(s, p);
        },
        py::arg("text"), py::arg("case_fold") = true);
    m.def(
        "word_spotting_eligible", [](const std::string& s) { return word_spotting_eligible(s); }, py::arg("text"));
    m.def("hmean", &hmean, py::arg("precision"), py::arg("recall"));
    m.def(
        "evaluate",
        [](const std::filesystem::path& gt, const std::filesystem::path& pred, const std::string& protocol,
           double iou_threshold, unsigned jobs) {
            const GroundTruthByImage g = load_ground_truth(gt);
            const PredictionsByImage p = load_predictions(pred);
            EvalOptions o;
            o.protocol = protocol_from(protocol);
            o.match.iou_threshold = iou_threshold;
            o.jobs = jobs;
            EvalReport r;
            {
                py::gil_scoped_release release;
                r = evaluate(g, p, o);
            }
            return report_to_json(r);
        },
        py::arg("gt"), py::arg("pred"), py::arg("protocol") = "e2e", py::arg("iou") = 0.5, py::arg("jobs") = 1,
        "Score predictions against ground truth; returns the JSON report text.");

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<std::string> full{"textspot"};
            full.insert(full.end(), args.begin(), args.end());
            std::vector<const char*> argv;
            for (const std::string& a : full) argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the command-line tool in-process; returns (exit_code, stdout, stderr).");
}

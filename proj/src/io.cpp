#include "textspot/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "textspot/error.hpp"
#include "textspot/utf8.hpp"

namespace textspot {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string id_of(const json& v) {
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_string()) return v.get<std::string>();
    throw std::invalid_argument("image_id must be an integer or string");
}

Prediction parse_detection(const json& det, const std::string& image_id) {
    if (!det.is_object()) throw std::invalid_argument("detection must be an object");
    const auto points = det.find("points");
    if (points == det.end() || !points->is_array()) throw std::invalid_argument("detection needs a 'points' array");
    std::vector<double> coords;
    for (const json& v : *points) {
        if (!v.is_number()) throw std::invalid_argument("'points' must hold numbers");
        coords.push_back(v.get<double>());
    }
    const auto text = det.find("transcription");
    if (text == det.end() || !text->is_string()) throw std::invalid_argument("detection needs a 'transcription' string");

    double score = 1.0;
    if (const auto s = det.find("score"); s != det.end()) {
        if (!s->is_number()) throw std::invalid_argument("'score' must be a number");
        score = s->get<double>();
    }

    Prediction p{image_id, Polygon::from_flat(coords), text->get<std::string>(), score, std::nullopt};
    if (const auto cp = det.find("char_probs"); cp != det.end() && !cp->is_null()) {
        const auto alphabet = cp->find("alphabet");
        const auto rows = cp->find("rows");
        if (alphabet == cp->end() || !alphabet->is_string() || rows == cp->end() || !rows->is_array()) {
            throw std::invalid_argument("'char_probs' needs an 'alphabet' string and a 'rows' array");
        }
        std::vector<std::vector<double>> table;
        for (const json& row : *rows) {
            if (!row.is_array()) throw std::invalid_argument("'char_probs.rows' must hold arrays");
            auto& r = table.emplace_back();
            for (const json& v : row) {
                if (!v.is_number()) throw std::invalid_argument("'char_probs.rows' must hold numbers");
                r.push_back(v.get<double>());
            }
        }
        CharProbMatrix m = CharProbMatrix::from_utf8(alphabet->get<std::string>(), std::move(table));
        const std::size_t len = utf8::decode(p.transcription).size();
        if (m.row_count() != len) {
            throw std::invalid_argument("'char_probs' has " + std::to_string(m.row_count()) + " rows for a " +
                                        std::to_string(len) + "-character transcription");
        }
        p.char_probs = std::move(m);
    }
    return p;
}

std::vector<fs::path> txt_files(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

template <typename F>
auto with_file_context(const fs::path& file, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw ParseError(file.string() + ": " + e.what(), e.line(), e.byte_offset());
    } catch (const GeometryError& e) {
        throw ParseError(file.string() + ": " + e.what());
    }
}

}  // namespace

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("failed writing " + path.string());
}

PredictionsByImage parse_predictions_jsonl(std::string_view text) {
    PredictionsByImage out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

        const std::string ctx = "line " + std::to_string(line_no) + ": ";
        json record;
        try {
            record = json::parse(line.begin(), line.end());
        } catch (const json::parse_error& e) {
            throw ParseError(ctx + "malformed JSON at column " + std::to_string(e.byte), line_no);
        }
        try {
            if (!record.is_object()) throw std::invalid_argument("record must be an object");
            const auto id = record.find("image_id");
            if (id == record.end()) throw std::invalid_argument("missing 'image_id'");
            std::string image_id = id_of(*id);
            if (out.contains(image_id)) throw std::invalid_argument("image '" + image_id + "' appears on more than one line");
            const auto dets = record.find("detections");
            if (dets == record.end() || !dets->is_array()) throw std::invalid_argument("missing 'detections' array");
            auto& list = out[image_id];
            for (const json& det : *dets) list.push_back(parse_detection(det, image_id));
        } catch (const std::invalid_argument& e) {
            throw ParseError(ctx + e.what(), line_no);
        } catch (const Error& e) {
            throw ParseError(ctx + e.what(), line_no);
        }
    }
    return out;
}

std::string predictions_to_jsonl(const PredictionsByImage& preds) {
    std::string out;
    for (const auto& [image, list] : preds) {
        json dets = json::array();
        for (const Prediction& p : list) {
            json pts = json::array();
            for (const Point& v : p.polygon.vertices()) {
                pts.push_back(v.x);
                pts.push_back(v.y);
            }
            json det = {{"points", pts}, {"transcription", p.transcription}, {"score", p.confidence}};
            if (p.char_probs) {
                det["char_probs"] = {{"alphabet", utf8::encode(p.char_probs->alphabet())},
                                     {"rows", p.char_probs->rows()}};
            }
            dets.push_back(std::move(det));
        }
        out += json{{"image_id", image}, {"detections", dets}}.dump(-1, ' ', false, json::error_handler_t::replace);
        out += '\n';
    }
    return out;
}

std::string icdar_image_id(const fs::path& file) {
    std::string stem = file.stem().string();
    for (std::string_view prefix : {"gt_", "res_"}) {
        if (stem.starts_with(prefix)) return stem.substr(prefix.size());
    }
    return stem;
}

Dataset load_coco_dataset(const fs::path& path) {
    return with_file_context(path, [&] { return parse_coco_text(read_text_file(path), path.stem().string()); });
}

GroundTruthByImage load_ground_truth(const fs::path& path) {
    if (fs::is_directory(path)) {
        GroundTruthByImage out;
        for (const fs::path& f : txt_files(path)) {
            const std::string id = icdar_image_id(f);
            out[id] = with_file_context(f, [&] { return parse_icdar_quad_gt(read_text_file(f), id); });
        }
        return out;
    }
    if (path.extension() == ".txt") {
        const std::string id = icdar_image_id(path);
        GroundTruthByImage out;
        out[id] = with_file_context(path, [&] { return parse_icdar_quad_gt(read_text_file(path), id); });
        return out;
    }
    return group_by_image(load_coco_dataset(path));
}

PredictionsByImage load_predictions(const fs::path& path) {
    if (!fs::is_directory(path)) {
        return with_file_context(path, [&] { return parse_predictions_jsonl(read_text_file(path)); });
    }
    PredictionsByImage out;
    for (const fs::path& f : txt_files(path)) {
        const std::string id = icdar_image_id(f);
        auto& list = out[id];
        // Submission lines share the ground-truth layout; "###" is not meaningful here.
        for (TextInstance& inst : with_file_context(f, [&] { return parse_icdar_quad_gt(read_text_file(f), id); })) {
            list.push_back(Prediction{id, std::move(inst.polygon), inst.transcription.value_or("###"), 1.0, std::nullopt});
        }
    }
    return out;
}

Dataset load_icdar_dataset(const fs::path& path) {
    Dataset d;
    d.subset_name = path.stem().string();
    for (auto& [image, instances] : load_ground_truth(path)) {
        double max_x = 1.0;
        double max_y = 1.0;
        for (const TextInstance& inst : instances) {
            const AxisAlignedBox b = bounding_box(inst.polygon);
            max_x = std::max(max_x, b.x_max);
            max_y = std::max(max_y, b.y_max);
        }
        d.images.push_back(ImageRecord{image, image, static_cast<std::int64_t>(std::ceil(max_x)),
                                       static_cast<std::int64_t>(std::ceil(max_y)), {}});
        for (TextInstance& inst : instances) d.instances.push_back(std::move(inst));
    }
    return d;
}

std::string icdar_quad_text(const std::vector<TextInstance>& instances) {
    std::vector<Prediction> rows;
    rows.reserve(instances.size());
    for (const TextInstance& inst : instances) {
        Polygon quad = inst.polygon;
        if (quad.size() != 4) {
            const AxisAlignedBox b = bounding_box(quad);
            quad = Polygon({{b.x_min, b.y_min}, {b.x_max, b.y_min}, {b.x_max, b.y_max}, {b.x_min, b.y_max}});
        }
        const bool care = inst.legible && inst.transcription;
        rows.push_back(Prediction{inst.image_id, std::move(quad), care ? *inst.transcription : "###", 1.0, std::nullopt});
    }
    return export_icdar_submission(rows);
}

}  // namespace textspot

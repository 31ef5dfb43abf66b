#include "textspot/annotation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "format.hpp"
#include "json.hpp"
#include "textspot/error.hpp"

namespace textspot {
namespace {

using nlohmann::json;

std::string dump_compact(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

std::string read_id(const json& obj, const std::string& where, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(where + ": missing field '" + key + "'", key);
    if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
    if (it->is_string()) return it->get<std::string>();
    throw SchemaError(where + ": field '" + std::string(key) + "' must be an integer or string", key);
}

const json& require(const json& obj, const std::string& where, const std::string& key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(where + ": missing field '" + key + "'", key);
    return *it;
}

bool read_bool(const json& obj, const std::string& where, const std::string& key) {
    const json& v = require(obj, where, key);
    if (!v.is_boolean()) throw SchemaError(where + ": field '" + key + "' must be a boolean", key);
    return v.get<bool>();
}

std::int64_t read_size(const json& obj, const std::string& where, const std::string& key) {
    const json& v = require(obj, where, key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
    }
    throw SchemaError(where + ": field '" + key + "' must be an integer", key);
}

std::vector<double> read_ring(const json& ring, const std::string& where) {
    if (!ring.is_array()) throw GeometryError(where + ": segmentation ring must be an array of numbers");
    std::vector<double> coords;
    coords.reserve(ring.size());
    for (const json& v : ring) {
        if (!v.is_number()) throw GeometryError(where + ": segmentation ring must be an array of numbers");
        coords.push_back(v.get<double>());
    }
    return coords;
}

ExtraFields collect_extra(const json& obj, std::initializer_list<std::string_view> known) {
    ExtraFields extra;
    for (const auto& [key, value] : obj.items()) {
        if (std::find(known.begin(), known.end(), key) != known.end()) continue;
        extra.emplace(key, dump_compact(value));
    }
    return extra;
}

ImageRecord parse_image(const json& j, std::size_t index) {
    const std::string where = "images[" + std::to_string(index) + "]";
    if (!j.is_object()) throw SchemaError(where + ": expected an object", "images");
    ImageRecord img;
    img.id = read_id(j, where, "id");
    const json& name = require(j, where, "file_name");
    if (!name.is_string()) throw SchemaError(where + ": field 'file_name' must be a string", "file_name");
    img.file_name = name.get<std::string>();
    img.width = read_size(j, where, "width");
    img.height = read_size(j, where, "height");
    img.extra = collect_extra(j, {"id", "file_name", "width", "height"});
    return img;
}

TextInstance parse_annotation(const json& j, std::size_t index) {
    const std::string where = "annotations[" + std::to_string(index) + "]";
    if (!j.is_object()) throw SchemaError(where + ": expected an object", "annotations");
    std::string id = read_id(j, where, "id");
    std::string image_id = read_id(j, where, "image_id");
    require(j, where, "bbox");

    const json& seg = require(j, where, "segmentation");
    if (!seg.is_array() || seg.empty()) {
        throw GeometryError(where + ": segmentation must be a non-empty list of polygon rings");
    }
    std::vector<double> first = read_ring(seg[0], where);
    if (first.size() < 6) {
        throw GeometryError(where + ": segmentation ring has " + std::to_string(first.size()) +
                            " numbers, need at least 6");
    }
    std::optional<Polygon> polygon;
    try {
        polygon.emplace(Polygon::from_flat(first));
    } catch (const GeometryError& e) {
        throw GeometryError(where + ": " + e.what());
    }
    std::vector<std::vector<double>> extra_rings;
    for (std::size_t r = 1; r < seg.size(); ++r) extra_rings.push_back(read_ring(seg[r], where));

    const std::string attr_where = where + ".attributes";
    const json& attrs = require(j, where, "attributes");
    if (!attrs.is_object()) throw SchemaError(attr_where + ": expected an object", "attributes");

    const bool legible = read_bool(attrs, attr_where, "legible");
    bool machine_printed = false;
    if (attrs.contains("machine_printed")) {
        machine_printed = read_bool(attrs, attr_where, "machine_printed");
    } else if (attrs.contains("machine-printed")) {
        machine_printed = read_bool(attrs, attr_where, "machine-printed");
    } else {
        throw SchemaError(attr_where + ": missing field 'machine_printed'", "attributes.machine_printed");
    }

    std::optional<std::string> transcription;
    if (const auto it = attrs.find("transcription"); it != attrs.end() && !it->is_null()) {
        if (!it->is_string()) {
            throw SchemaError(attr_where + ": field 'transcription' must be a string", "attributes.transcription");
        }
        if (!it->get_ref<const std::string&>().empty()) transcription = it->get<std::string>();
    }
    if (legible && !transcription) {
        throw SchemaError(attr_where + ": missing field 'transcription' on a legible instance",
                          "attributes.transcription");
    }

    TextInstance inst{std::move(id), std::move(image_id), std::move(*polygon), std::move(transcription),
                      legible, machine_printed, {}, {}, {}};
    inst.extra_rings = std::move(extra_rings);
    inst.extra = collect_extra(j, {"id", "image_id", "bbox", "segmentation", "attributes"});
    inst.extra_attributes =
        collect_extra(attrs, {"transcription", "legible", "machine_printed", "machine-printed"});
    return inst;
}

// Integers are emitted bare only when they read back as the same string.
std::string id_text(const std::string& id) {
    const bool canonical_int = !id.empty() && id.size() <= 18 &&
                               std::all_of(id.begin(), id.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
                               (id == "0" || id.front() != '0');
    return canonical_int ? id : detail::quote(id);
}

std::string coords_text(std::span<const double> coords) {
    std::string out = "[";
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (i) out += ',';
        out += detail::fixed(coords[i], 2);
    }
    out += ']';
    return out;
}

std::string object_text(const std::map<std::string, std::string>& members) {
    std::string out = "{";
    bool first = true;
    for (const auto& [key, value] : members) {
        if (!first) out += ',';
        first = false;
        out += detail::quote(key);
        out += ':';
        out += value;
    }
    out += '}';
    return out;
}

std::string annotation_text(const TextInstance& inst) {
    std::map<std::string, std::string> attrs(inst.extra_attributes.begin(), inst.extra_attributes.end());
    attrs["legible"] = inst.legible ? "true" : "false";
    attrs["machine_printed"] = inst.machine_printed ? "true" : "false";
    if (inst.transcription) attrs["transcription"] = detail::quote(*inst.transcription);

    std::vector<double> ring;
    ring.reserve(inst.polygon.size() * 2);
    for (const Point& p : inst.polygon.vertices()) {
        ring.push_back(p.x);
        ring.push_back(p.y);
    }
    std::string seg = "[" + coords_text(ring);
    for (const auto& extra : inst.extra_rings) seg += "," + coords_text(extra);
    seg += "]";

    const AxisAlignedBox box = bounding_box(inst.polygon);
    const double bbox[] = {box.x_min, box.y_min, box.width(), box.height()};

    std::map<std::string, std::string> members(inst.extra.begin(), inst.extra.end());
    members["attributes"] = object_text(attrs);
    members["bbox"] = coords_text(bbox);
    members["id"] = id_text(inst.id);
    members["image_id"] = id_text(inst.image_id);
    members["segmentation"] = seg;
    return object_text(members);
}

std::string image_text(const ImageRecord& img) {
    std::map<std::string, std::string> members(img.extra.begin(), img.extra.end());
    members["file_name"] = detail::quote(img.file_name);
    members["height"] = std::to_string(img.height);
    members["id"] = id_text(img.id);
    members["width"] = std::to_string(img.width);
    return object_text(members);
}

template <typename T, typename F>
std::string array_block(const std::vector<T>& items, F&& render) {
    if (items.empty()) return "[]";
    std::string out = "[\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
        out += "    ";
        out += render(items[i]);
        out += i + 1 < items.size() ? ",\n" : "\n";
    }
    out += "  ]";
    return out;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view text, double& out) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end && !text.empty();
}

std::string unquote(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        std::string out;
        s = s.substr(1, s.size() - 2);
        for (std::size_t i = 0; i < s.size(); ++i) {
            out.push_back(s[i]);
            if (s[i] == '"' && i + 1 < s.size() && s[i + 1] == '"') ++i;
        }
        return out;
    }
    return std::string(s);
}

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }
bool is_ascii_alnum(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

}  // namespace

std::size_t ViolationReport::error_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                  [](const Violation& v) { return v.severity == Severity::kError; }));
}

std::string_view to_string(Severity s) noexcept { return s == Severity::kError ? "error" : "warning"; }

Dataset parse_coco_text(std::string_view document, std::string subset_name) {
    json root;
    try {
        root = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON at byte ") + std::to_string(e.byte) + ": " + e.what(),
                         std::nullopt, e.byte);
    }
    if (!root.is_object()) throw SchemaError("document root must be an object", "");

    const json& images = require(root, "document", "images");
    const json& annotations = require(root, "document", "annotations");
    if (!images.is_array()) throw SchemaError("document: field 'images' must be an array", "images");
    if (!annotations.is_array()) throw SchemaError("document: field 'annotations' must be an array", "annotations");

    Dataset d;
    d.subset_name = std::move(subset_name);
    d.images.reserve(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) d.images.push_back(parse_image(images[i], i));
    d.instances.reserve(annotations.size());
    for (std::size_t i = 0; i < annotations.size(); ++i) d.instances.push_back(parse_annotation(annotations[i], i));
    d.extra = collect_extra(root, {"images", "annotations"});
    return d;
}

std::string serialize_coco_text(const Dataset& d) {
    std::map<std::string, std::string> members(d.extra.begin(), d.extra.end());
    members["annotations"] = array_block(d.instances, annotation_text);
    members["images"] = array_block(d.images, image_text);

    std::string out = "{\n";
    std::size_t i = 0;
    for (const auto& [key, value] : members) {
        out += "  ";
        out += detail::quote(key);
        out += ": ";
        out += value;
        out += ++i < members.size() ? ",\n" : "\n";
    }
    out += "}\n";
    return out;
}

std::vector<TextInstance> parse_icdar_quad_gt(std::string_view lines, const std::string& image_id) {
    constexpr std::string_view kBom = "\xEF\xBB\xBF";
    if (lines.substr(0, kBom.size()) == kBom) lines.remove_prefix(kBom.size());

    std::vector<TextInstance> out;
    std::size_t line_no = 0;
    while (!lines.empty()) {
        ++line_no;
        const auto nl = lines.find('\n');
        std::string_view line = lines.substr(0, nl);
        lines = nl == std::string_view::npos ? std::string_view{} : lines.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty()) continue;

        const std::string ctx = "line " + std::to_string(line_no) + ": ";
        std::vector<Point> pts;
        std::string_view rest = line;
        for (int k = 0; k < 8; ++k) {
            const auto comma = rest.find(',');
            if (comma == std::string_view::npos) {
                throw ParseError(ctx + "expected 8 coordinates followed by a transcription", line_no);
            }
            const std::string_view field = rest.substr(0, comma);
            rest.remove_prefix(comma + 1);
            double v = 0.0;
            if (!parse_double(field, v)) {
                throw ParseError(ctx + "non-numeric coordinate '" + std::string(field) + "'", line_no);
            }
            if (k % 2 == 0) {
                pts.push_back({v, 0.0});
            } else {
                pts.back().y = v;
            }
        }
        const std::string text = unquote(rest);
        if (text.empty()) throw ParseError(ctx + "missing transcription", line_no);

        std::optional<Polygon> poly;
        try {
            poly.emplace(std::move(pts));
        } catch (const GeometryError& e) {
            throw ParseError(ctx + e.what(), line_no);
        }
        const bool dont_care = text == "###";
        out.push_back(TextInstance{image_id + "_" + std::to_string(out.size()), image_id, std::move(*poly),
                                   dont_care ? std::nullopt : std::optional<std::string>(text), !dont_care,
                                   false, {}, {}, {}});
    }
    return out;
}

std::string export_icdar_submission(const std::vector<Prediction>& preds) {
    std::string out;
    for (const Prediction& p : preds) {
        for (const Point& v : p.polygon.vertices()) {
            out += std::to_string(std::lround(v.x));
            out += ',';
            out += std::to_string(std::lround(v.y));
            out += ',';
        }
        const bool needs_quotes = p.transcription.find_first_of(",\"") != std::string::npos;
        if (needs_quotes) {
            out += '"';
            for (char c : p.transcription) {
                out += c;
                if (c == '"') out += '"';
            }
            out += '"';
        } else {
            out += p.transcription;
        }
        out += '\n';
    }
    return out;
}

ViolationReport validate(const Dataset& d, const ValidationOptions& options) {
    ViolationReport report;
    auto add = [&](const std::string& id, std::string rule, std::string message, Severity sev = Severity::kError) {
        report.violations.push_back({id, std::move(rule), std::move(message), sev});
    };

    std::unordered_map<std::string, const ImageRecord*> images;
    for (const ImageRecord& img : d.images) {
        if (!images.emplace(img.id, &img).second) add(img.id, "DUPLICATE_IMAGE_ID", "image id appears more than once");
        if (img.width <= 0 || img.height <= 0) {
            add(img.id, "INVALID_IMAGE_SIZE",
                "image size " + std::to_string(img.width) + "x" + std::to_string(img.height) + " is not positive");
        }
    }

    std::unordered_set<std::string> seen;
    for (const TextInstance& inst : d.instances) {
        if (!seen.insert(inst.id).second) add(inst.id, "DUPLICATE_INSTANCE_ID", "instance id appears more than once");

        const auto img = images.find(inst.image_id);
        if (img == images.end()) {
            add(inst.id, "DANGLING_IMAGE_ID", "image id '" + inst.image_id + "' has no image record");
        }

        try {
            const NormalizedPolygon n = normalize_polygon(inst.polygon);
            if (n.self_intersecting) {
                add(inst.id, "NON_SIMPLE_POLYGON", "polygon edges intersect");
            } else if (!(polygon_area(n.polygon) > 0.0)) {
                add(inst.id, "DEGENERATE_POLYGON", "polygon has zero area");
            }
        } catch (const GeometryError& e) {
            add(inst.id, "DEGENERATE_POLYGON", e.what());
        }

        if (img != images.end() && img->second->width > 0 && img->second->height > 0) {
            const double w = static_cast<double>(img->second->width);
            const double h = static_cast<double>(img->second->height);
            for (const Point& p : inst.polygon.vertices()) {
                if (p.x < -0.5 || p.y < -0.5 || p.x > w + 0.5 || p.y > h + 0.5) {
                    add(inst.id, "VERTEX_OUT_OF_BOUNDS",
                        "vertex (" + detail::fixed(p.x, 2) + ", " + detail::fixed(p.y, 2) + ") lies outside the " +
                            std::to_string(img->second->width) + "x" + std::to_string(img->second->height) + " image");
                    break;
                }
            }
        }

        if (!inst.extra_rings.empty()) {
            add(inst.id, "MULTI_RING_SEGMENTATION", "only the first segmentation ring is used", Severity::kWarning);
        }

        if (!inst.transcription) {
            if (inst.legible) add(inst.id, "MISSING_TRANSCRIPTION", "legible instance has no transcription");
            continue;
        }
        const std::string& t = *inst.transcription;
        if (t.empty()) {
            add(inst.id, "EMPTY_TRANSCRIPTION", "transcription is empty");
            continue;
        }
        if (std::any_of(t.begin(), t.end(), [](char c) { return is_space(static_cast<unsigned char>(c)); })) {
            add(inst.id, "SPACE_IN_TRANSCRIPTION", "transcription '" + t + "' contains whitespace");
        }
        switch (options.charset) {
            case CharsetPolicy::kPrintableAscii:
                if (std::any_of(t.begin(), t.end(), [](char c) {
                        const auto u = static_cast<unsigned char>(c);
                        return u < 0x20 || u > 0x7E;
                    })) {
                    add(inst.id, "NON_ASCII_TRANSCRIPTION", "transcription has characters outside printable ASCII",
                        Severity::kWarning);
                }
                break;
            case CharsetPolicy::kAlphanumeric:
                if (!std::all_of(t.begin(), t.end(), [](char c) { return is_ascii_alnum(static_cast<unsigned char>(c)); })) {
                    add(inst.id, "NON_ALNUM_TRANSCRIPTION", "transcription has characters other than English letters and digits",
                        Severity::kWarning);
                }
                break;
            case CharsetPolicy::kAny:
                break;
        }
    }
    return report;
}

SubsetStats subset_stats(const Dataset& d) noexcept {
    SubsetStats s;
    s.images = d.images.size();
    s.instances = d.instances.size();
    s.legible = static_cast<std::uint64_t>(
        std::count_if(d.instances.begin(), d.instances.end(), [](const TextInstance& i) { return i.legible; }));
    return s;
}

SubsetStats aggregate_stats(const std::vector<SubsetStats>& rows) noexcept {
    SubsetStats total;
    for (const SubsetStats& r : rows) {
        total.images += r.images;
        total.instances += r.instances;
        total.legible += r.legible;
    }
    return total;
}

}  // namespace textspot

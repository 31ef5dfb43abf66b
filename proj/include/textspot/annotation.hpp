#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "textspot/geometry.hpp"
#include "textspot/prediction.hpp"

namespace textspot {

/// Unknown JSON members kept verbatim for round trips: key -> compact JSON text.
using ExtraFields = std::map<std::string, std::string>;

struct TextInstance {
    std::string id;
    std::string image_id;
    Polygon polygon;
    std::optional<std::string> transcription;
    bool legible = true;
    bool machine_printed = false;

    // Segmentation rings after the first; carried along but not used as geometry.
    std::vector<std::vector<double>> extra_rings;
    ExtraFields extra;
    ExtraFields extra_attributes;

    bool operator==(const TextInstance&) const = default;
};

struct ImageRecord {
    std::string id;
    std::string file_name;
    std::int64_t width = 0;
    std::int64_t height = 0;
    ExtraFields extra;

    bool operator==(const ImageRecord&) const = default;
};

struct Dataset {
    std::string subset_name;
    std::vector<ImageRecord> images;
    std::vector<TextInstance> instances;
    ExtraFields extra;

    bool operator==(const Dataset&) const = default;
};

struct SubsetStats {
    std::uint64_t images = 0;
    std::uint64_t instances = 0;
    std::uint64_t legible = 0;

    bool operator==(const SubsetStats&) const = default;
};

enum class Severity { kError, kWarning };

struct Violation {
    std::string subject_id;  // instance id, or image id for image-level rules
    std::string rule;        // e.g. "SPACE_IN_TRANSCRIPTION"
    std::string message;
    Severity severity = Severity::kError;

    bool operator==(const Violation&) const = default;
};

struct ViolationReport {
    std::vector<Violation> violations;

    bool empty() const noexcept { return violations.empty(); }
    std::size_t error_count() const noexcept;
};

enum class CharsetPolicy {
    kPrintableAscii,  // default; anything else is a warning
    kAlphanumeric,    // English letters and digits only
    kAny,
};

struct ValidationOptions {
    CharsetPolicy charset = CharsetPolicy::kPrintableAscii;
};

/// Parses the COCO-like text annotation document. `subset_name` is not part
/// of the document and is attached to the result as given.
/// Throws ParseError (with byte offset) for malformed JSON, SchemaError for
/// missing or mistyped members and GeometryError for unusable segmentations.
Dataset parse_coco_text(std::string_view document, std::string subset_name = {});

/// Canonical form: keys sorted, coordinates with two decimals, LF endings,
/// bbox recomputed from the polygon.
std::string serialize_coco_text(const Dataset& d);

/// Parses `x1,y1,...,x4,y4,transcription` lines. "###" marks an illegible
/// instance. Instance ids are `<image_id>_<n>` with n counting records from 0.
std::vector<TextInstance> parse_icdar_quad_gt(std::string_view lines, const std::string& image_id);

/// One line per prediction: rounded integer vertices, then the transcription.
std::string export_icdar_submission(const std::vector<Prediction>& preds);

ViolationReport validate(const Dataset& d, const ValidationOptions& options = {});

SubsetStats subset_stats(const Dataset& d) noexcept;
SubsetStats aggregate_stats(const std::vector<SubsetStats>& rows) noexcept;

std::string_view to_string(Severity s) noexcept;

}  // namespace textspot

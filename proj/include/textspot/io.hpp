#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "textspot/metrics.hpp"

namespace textspot {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// One JSON object per line:
///   {"image_id", "detections": [{"points": [x1, y1, ...], "transcription",
///    "score", "char_probs": {"alphabet", "rows"}}]}
/// `score` defaults to 1 and `char_probs` is optional. Blank lines are
/// skipped; an image may appear on one line only. Errors carry line numbers.
PredictionsByImage parse_predictions_jsonl(std::string_view text);
std::string predictions_to_jsonl(const PredictionsByImage& preds);

/// Strips a "gt_" or "res_" prefix from an ICDAR file stem.
std::string icdar_image_id(const std::filesystem::path& file);

/// Parses a COCO-like JSON file; errors are prefixed with the path.
Dataset load_coco_dataset(const std::filesystem::path& path);

/// A COCO-like .json file, a single ICDAR ground-truth .txt file, or a
/// directory of ICDAR ground-truth .txt files.
GroundTruthByImage load_ground_truth(const std::filesystem::path& path);

/// A prediction JSONL file or a directory of ICDAR submission .txt files.
PredictionsByImage load_predictions(const std::filesystem::path& path);

/// Reads a directory (or single file) of ICDAR quad ground truth as a
/// Dataset. Image sizes are not part of the format and are taken as the
/// rounded-up extent of the annotations.
Dataset load_icdar_dataset(const std::filesystem::path& path);

/// ICDAR ground-truth text for one image; polygons that are not quads are
/// written as their bounding box.
std::string icdar_quad_text(const std::vector<TextInstance>& instances);

}  // namespace textspot

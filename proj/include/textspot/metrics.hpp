#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "textspot/annotation.hpp"
#include "textspot/lexicon.hpp"
#include "textspot/matching.hpp"
#include "textspot/normalize.hpp"
#include "textspot/prediction.hpp"

namespace textspot {

enum class Protocol { kEndToEnd, kWordSpotting };

/// "end_to_end" / "word_spotting".
std::string_view to_string(Protocol p) noexcept;

/// 2pr / (p + r), or 0 when p + r is 0.
double hmean(double precision, double recall) noexcept;

struct Counts {
    std::uint64_t true_positives = 0;
    std::uint64_t false_positives = 0;
    std::uint64_t false_negatives = 0;

    double precision() const noexcept;  // 0 when nothing was predicted
    double recall() const noexcept;     // 0 when there is nothing to find
    double hmean() const noexcept { return textspot::hmean(precision(), recall()); }

    Counts& operator+=(const Counts& o) noexcept;
    bool operator==(const Counts&) const = default;
};

/// An instance that could not take part in scoring, e.g. a self-intersecting
/// polygon. The rest of the image is still evaluated.
struct InstanceError {
    std::string image_id;
    std::string kind;  // "gt" or "pred"
    std::size_t index = 0;
    std::string message;

    bool operator==(const InstanceError&) const = default;
};

struct EvalReport {
    Protocol protocol = Protocol::kEndToEnd;
    Counts totals;
    double precision = 0.0;
    double recall = 0.0;
    double hmean = 0.0;
    std::map<std::string, Counts> per_image;
    std::vector<InstanceError> errors;

    bool operator==(const EvalReport&) const = default;
};

struct EvalOptions {
    Protocol protocol = Protocol::kEndToEnd;
    NormalizationPolicy policy;
    MatchOptions match;
    /// Optional lexicon correction of prediction transcriptions; not owned.
    const Lexicon* lexicon = nullptr;
    double wed_threshold = 0.5;
    /// Worker threads across images; results do not depend on it.
    unsigned jobs = 1;
};

using GroundTruthByImage = std::map<std::string, std::vector<TextInstance>>;
using PredictionsByImage = std::map<std::string, std::vector<Prediction>>;

/// Every image record gets an entry, including images without instances.
GroundTruthByImage group_by_image(const Dataset& d);

/// Per image: word-spotting reclassification of ineligible words to
/// don't-care, matching, optional lexicon correction, then counting. A matched
/// pair with the wrong transcription is one FP and one FN; absorbed
/// predictions count as neither. Throws Error for predictions on images
/// absent from the ground truth.
EvalReport evaluate(const GroundTruthByImage& gt, const PredictionsByImage& preds, const EvalOptions& options = {});

/// Sorted keys, reals with 6 decimals, trailing LF.
std::string report_to_json(const EvalReport& r);
std::string report_to_csv(const EvalReport& r);
std::string report_to_table(const EvalReport& r);

/// "P=0.500000 R=1.000000 H=0.666667"
std::string summary_line(const EvalReport& r);

}  // namespace textspot

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "textspot/annotation.hpp"
#include "textspot/geometry.hpp"
#include "textspot/prediction.hpp"

namespace textspot {

enum class MatchOrder {
    kSuppressThenMatch,  // default: don't-care absorption runs first
    kMatchThenSuppress,  // only predictions left unmatched can be absorbed
};

struct MatchOptions {
    double iou_threshold = 0.5;
    /// A prediction is absorbed by a don't-care region when
    /// area(pred ∩ region) / area(pred) exceeds this.
    double dont_care_overlap = 0.5;
    MatchOrder order = MatchOrder::kSuppressThenMatch;
};

struct MatchedPair {
    std::size_t gt = 0;
    std::size_t pred = 0;
    double iou = 0.0;

    bool operator==(const MatchedPair&) const = default;
};

/// Indices refer to positions in the input lists. unmatched_gt only lists
/// care instances; don't-care instances never appear in the result.
struct MatchResult {
    std::vector<MatchedPair> pairs;
    std::vector<std::size_t> unmatched_gt;
    std::vector<std::size_t> unmatched_pred;
    std::vector<std::size_t> suppressed_pred;

    bool operator==(const MatchResult&) const = default;
};

/// One-to-one matching. Candidate pairs with IoU above the threshold are
/// accepted greedily by descending IoU, ties to the lower gt index and then
/// the lower prediction index. `care[i]` selects which ground-truth regions
/// are scored; the rest act as don't-care regions.
MatchResult match_prepared(std::span<const PreparedPolygon> gts, const std::vector<bool>& care,
                           std::span<const PreparedPolygon> preds, const MatchOptions& options = {});

/// Care instances are the legible ones. Throws MatchingError for inputs from
/// more than one image or a threshold outside (0, 1), GeometryError for
/// unusable polygons.
MatchResult match_instances(const std::vector<TextInstance>& gts, const std::vector<Prediction>& preds,
                            const MatchOptions& options = {});

}  // namespace textspot
